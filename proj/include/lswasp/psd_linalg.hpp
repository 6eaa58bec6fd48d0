#pragma once

// Symmetric / positive-definite matrix primitives: spectral square roots,
// the Bures metric and the 2-Wasserstein distance between location-scatter
// laws. Everything here is a pure function of its arguments.

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace lswasp {

/// Dense symmetric matrix. Construction symmetrizes (A + A^T) / 2, so the
/// stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Eigen::VectorXd& diag);
  static SymMatrix zero(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }

  /// Principal submatrix on the given coordinates.
  SymMatrix restrict_to(const std::vector<Eigen::Index>& coords) const;

  friend SymMatrix operator*(double c, const SymMatrix& a) {
    return SymMatrix(c * a.m_);
  }

 private:
  Eigen::MatrixXd m_;
};

struct SymEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

struct SpdCheckReport {
  double min_eigenvalue = 0.0;
  bool is_spd = false;
  // True when eigenvalues in [-tol, 0) were set to zero.
  bool clamped = false;
};

/// Eigenvalue floor used when the caller does not give one:
/// 1e-12 * max |eigenvalue| (and an absolute floor for the zero matrix).
double default_clamp_tolerance(const Eigen::VectorXd& eigenvalues);

/// Throws NumericalError if the solver fails to converge.
SymEigen sym_eigen(const SymMatrix& a);

SpdCheckReport check_spd(const SymMatrix& a,
                         std::optional<double> tol = std::nullopt);

/// Symmetric PSD square root. Eigenvalues in [-clamp_tol, 0) are clamped
/// to zero; anything more negative raises NotPsdError.
SymMatrix psd_sqrt(const SymMatrix& a,
                   std::optional<double> clamp_tol = std::nullopt);
SymMatrix psd_sqrt(const SymMatrix& a, std::optional<double> clamp_tol,
                   SpdCheckReport& report);

/// Inverse symmetric square root; requires min eigenvalue > clamp_tol,
/// otherwise raises SingularMatrixError.
SymMatrix psd_inv_sqrt(const SymMatrix& a,
                       std::optional<double> clamp_tol = std::nullopt);

/// Square root and inverse square root from one eigendecomposition.
struct RootPair {
  SymMatrix root;
  SymMatrix inv_root;
};
RootPair psd_sqrt_and_inv_sqrt(const SymMatrix& a,
                               std::optional<double> clamp_tol = std::nullopt);

/// Bures metric d(A, B) = sqrt(tr(A + B - 2 (A^1/2 B A^1/2)^1/2)).
double bures_dist(const SymMatrix& a, const SymMatrix& b);

/// Squared 2-Wasserstein distance between two members of one
/// location-scatter family: |mu1 - mu2|^2 + d(S1, S2)^2.
double gaussian_w2_sq(const Eigen::VectorXd& mu1, const SymMatrix& s1,
                      const Eigen::VectorXd& mu2, const SymMatrix& s2);

}  // namespace lswasp
