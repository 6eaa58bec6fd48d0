#include "lswasp/psd_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lswasp/errors.hpp"

namespace lswasp {

namespace {

void require_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "symmetric matrix must be square, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
  if (m.rows() < 1) throw ValidationError("symmetric matrix must have dim >= 1");
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ValidationError(os.str());
  }
}

// V f(diag) V^T with the diagonal already transformed.
SymMatrix from_spectrum(const Eigen::MatrixXd& vectors,
                        const Eigen::VectorXd& values) {
  return SymMatrix(vectors * values.asDiagonal() * vectors.transpose());
}

Eigen::VectorXd clamped_sqrt(const SymEigen& eig, double tol,
                             SpdCheckReport& report) {
  const Eigen::VectorXd& lam = eig.values;
  report.min_eigenvalue = lam(0);
  report.is_spd = lam(0) > tol;
  report.clamped = false;
  if (lam(0) < -tol) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite: min eigenvalue " << lam(0)
       << " < -" << tol;
    throw NotPsdError(os.str(), lam(0));
  }
  Eigen::VectorXd out(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < 0.0) {
      report.clamped = true;
      out(i) = 0.0;
    } else {
      out(i) = std::sqrt(lam(i));
    }
  }
  return out;
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  require_square(m);
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymMatrix SymMatrix::zero(Eigen::Index dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SymMatrix SymMatrix::restrict_to(const std::vector<Eigen::Index>& coords) const {
  const auto d = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd sub(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      sub(i, j) = m_(coords[static_cast<std::size_t>(i)],
                     coords[static_cast<std::size_t>(j)]);
    }
  }
  return SymMatrix(sub);
}

double default_clamp_tolerance(const Eigen::VectorXd& eigenvalues) {
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  return 1e-12 * std::max(scale, 1e-300);
}

SymEigen sym_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "symmetric eigensolver failed to converge (dim " << a.dim() << ")";
    throw NumericalError(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SpdCheckReport check_spd(const SymMatrix& a, std::optional<double> tol) {
  const SymEigen eig = sym_eigen(a);
  const double t = tol.value_or(default_clamp_tolerance(eig.values));
  SpdCheckReport r;
  r.min_eigenvalue = eig.values(0);
  r.is_spd = r.min_eigenvalue > t;
  r.clamped = r.min_eigenvalue < 0.0 && r.min_eigenvalue >= -t;
  return r;
}

SymMatrix psd_sqrt(const SymMatrix& a, std::optional<double> clamp_tol,
                   SpdCheckReport& report) {
  const SymEigen eig = sym_eigen(a);
  const double tol = clamp_tol.value_or(default_clamp_tolerance(eig.values));
  return from_spectrum(eig.vectors, clamped_sqrt(eig, tol, report));
}

SymMatrix psd_sqrt(const SymMatrix& a, std::optional<double> clamp_tol) {
  SpdCheckReport report;
  return psd_sqrt(a, clamp_tol, report);
}

RootPair psd_sqrt_and_inv_sqrt(const SymMatrix& a,
                               std::optional<double> clamp_tol) {
  const SymEigen eig = sym_eigen(a);
  const double tol = clamp_tol.value_or(default_clamp_tolerance(eig.values));
  if (eig.values(0) <= tol) {
    std::ostringstream os;
    os << "matrix is singular to tolerance " << tol << ": min eigenvalue "
       << eig.values(0);
    throw SingularMatrixError(os.str(), eig.values(0));
  }
  const Eigen::VectorXd root = eig.values.cwiseSqrt();
  return {from_spectrum(eig.vectors, root),
          from_spectrum(eig.vectors, root.cwiseInverse())};
}

SymMatrix psd_inv_sqrt(const SymMatrix& a, std::optional<double> clamp_tol) {
  return psd_sqrt_and_inv_sqrt(a, clamp_tol).inv_root;
}

double bures_dist(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "bures_dist");
  // Validates b; a is validated by its own square root below.
  {
    const SymEigen eb = sym_eigen(b);
    const double tol = default_clamp_tolerance(eb.values);
    if (eb.values(0) < -tol) {
      std::ostringstream os;
      os << "bures_dist: second argument is not PSD (min eigenvalue "
         << eb.values(0) << ")";
      throw NotPsdError(os.str(), eb.values(0));
    }
  }
  const SymEigen ea = sym_eigen(a);
  const double tol_a = default_clamp_tolerance(ea.values);
  SpdCheckReport rep;
  const Eigen::VectorXd root_vals = clamped_sqrt(ea, tol_a, rep);
  const Eigen::MatrixXd root =
      ea.vectors * root_vals.asDiagonal() * ea.vectors.transpose();
  const SymMatrix inner(root * b.matrix() * root);
  const SymMatrix inner_root = psd_sqrt(inner);

  // For well-conditioned A the transport-map form
  //   d^2 = |A^1/2 - A^-1/2 (A^1/2 B A^1/2)^1/2|_F^2
  // avoids the cancellation in the trace form when A ~ B.
  const double lam_max = ea.values(ea.values.size() - 1);
  if (ea.values(0) > 1e-10 * lam_max && lam_max > 0.0) {
    const Eigen::MatrixXd inv_root = ea.vectors *
                                     root_vals.cwiseInverse().asDiagonal() *
                                     ea.vectors.transpose();
    return (root - inv_root * inner_root.matrix()).norm();
  }
  const double sq = a.trace() + b.trace() - 2.0 * inner_root.trace();
  return std::sqrt(std::max(sq, 0.0));
}

double gaussian_w2_sq(const Eigen::VectorXd& mu1, const SymMatrix& s1,
                      const Eigen::VectorXd& mu2, const SymMatrix& s2) {
  if (mu1.size() != mu2.size() || mu1.size() != s1.dim() ||
      s1.dim() != s2.dim()) {
    std::ostringstream os;
    os << "gaussian_w2_sq: inconsistent dimensions (means " << mu1.size()
       << ", " << mu2.size() << "; covariances " << s1.dim() << ", "
       << s2.dim() << ")";
    throw ValidationError(os.str());
  }
  const double d = bures_dist(s1, s2);
  return (mu1 - mu2).squaredNorm() + d * d;
}

}  // namespace lswasp
