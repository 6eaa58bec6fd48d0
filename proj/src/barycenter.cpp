#include "lswasp/barycenter.hpp"

#include <algorithm>
#include <sstream>

#include "lswasp/errors.hpp"

namespace lswasp {

namespace {

void check_subsets(std::span<const DrawMatrix> draws,
                   std::span<const MomentSummary> summaries) {
  if (draws.empty()) throw ValidationError("no subsets to combine");
  if (draws.size() != summaries.size()) {
    throw ValidationError("subset draws and summaries differ in count");
  }
  const Eigen::Index d = draws[0].dim();
  for (std::size_t j = 0; j < draws.size(); ++j) {
    draws[j].validate();
    if (draws[j].dim() != d || summaries[j].mean.size() != d ||
        summaries[j].cov.dim() != d) {
      std::ostringstream os;
      os << "subset " << j + 1 << " has dimension " << draws[j].dim()
         << ", expected " << d;
      throw ValidationError(os.str());
    }
  }
}

DrawMatrix stacked_shell(std::span<const DrawMatrix> draws) {
  Eigen::Index total = 0;
  for (const auto& dm : draws) total += dm.rows();
  DrawMatrix out;
  out.draws.resize(total, draws[0].dim());
  out.param_names = draws[0].param_names;
  out.diagnostics.seed_used = draws[0].diagnostics.seed_used;
  return out;
}

}  // namespace

std::string to_string(CombineMethod m) {
  return m == CombineMethod::wasp ? "wasp" : "dpmc";
}

CombineMethod parse_combine_method(const std::string& s) {
  if (s == "wasp") return CombineMethod::wasp;
  if (s == "dpmc") return CombineMethod::dpmc;
  throw ValidationError("unknown combine method '" + s + "' (expected wasp or dpmc)");
}

MomentSummary MomentSummary::restrict_to(
    const std::vector<Eigen::Index>& coords) const {
  MomentSummary out;
  out.mean.resize(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out.mean(static_cast<Eigen::Index>(i)) = mean(coords[i]);
  }
  out.cov = cov.restrict_to(coords);
  out.n_draws = n_draws;
  return out;
}

void FixedPointConfig::validate() const {
  if (!(tol > 0.0)) throw ValidationError("fixed-point tolerance must be > 0");
  if (max_iter < 1) throw ValidationError("fixed-point max_iter must be >= 1");
}

MomentSummary moment_summary(const Eigen::MatrixXd& draws) {
  const Eigen::Index t = draws.rows();
  if (t < 2) {
    std::ostringstream os;
    os << "moment summary needs at least 2 draws, got " << t;
    throw ValidationError(os.str());
  }
  if (draws.cols() < 1) throw ValidationError("moment summary needs d >= 1");
  MomentSummary s;
  s.n_draws = t;
  s.mean = draws.colwise().mean().transpose();
  const Eigen::MatrixXd centered = draws.rowwise() - s.mean.transpose();
  s.cov = SymMatrix(centered.transpose() * centered / static_cast<double>(t));
  return s;
}

MomentSummary moment_summary(const DrawMatrix& draws) {
  return moment_summary(draws.draws);
}

Eigen::VectorXd barycenter_mean(std::span<const Eigen::VectorXd> means) {
  if (means.empty()) throw ValidationError("barycenter_mean of an empty list");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(means[0].size());
  for (const auto& m : means) {
    if (m.size() != acc.size()) {
      throw ValidationError("barycenter_mean: dimension mismatch");
    }
    acc += m;
  }
  return acc / static_cast<double>(means.size());
}

BarycenterResult barycenter_cov_fixed_point(std::span<const SymMatrix> covs,
                                            const FixedPointConfig& config) {
  config.validate();
  if (covs.empty()) throw ValidationError("barycenter of an empty list");
  const Eigen::Index d = covs[0].dim();
  for (const auto& c : covs) {
    if (c.dim() != d) throw ValidationError("barycenter: dimension mismatch");
    const SymEigen eig = sym_eigen(c);
    const double tol = config.clamp_tol.value_or(default_clamp_tolerance(eig.values));
    if (eig.values(0) < -tol) {
      std::ostringstream os;
      os << "barycenter: input covariance is not PSD (min eigenvalue "
         << eig.values(0) << ")";
      throw NotPsdError(os.str(), eig.values(0));
    }
  }

  BarycenterResult result;
  if (covs.size() == 1) {
    // a single law is its own barycenter; iterating would only add rounding
    result.cov = covs[0];
    result.converged = true;
    return result;
  }
  const double k = static_cast<double>(covs.size());
  SymMatrix s = SymMatrix::identity(d);
  for (int it = 1; it <= config.max_iter; ++it) {
    const RootPair roots = psd_sqrt_and_inv_sqrt(s, config.clamp_tol);
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(d, d);
    for (const auto& c : covs) {
      const SymMatrix inner(roots.root.matrix() * c.matrix() * roots.root.matrix());
      avg += psd_sqrt(inner, config.clamp_tol).matrix();
    }
    avg /= k;
    const Eigen::MatrixXd half = roots.inv_root.matrix() * avg;
    SymMatrix next(half.transpose() * half);

    const double step =
        (next.matrix() - s.matrix()).norm() / std::max(s.frobenius_norm(), 1e-300);
    s = std::move(next);
    result.iterations_used = it;
    result.final_step_norm = step;
    if (step <= config.tol) {
      result.converged = true;
      break;
    }
  }
  result.cov = std::move(s);
  return result;
}

BarycenterResult barycenter(std::span<const MomentSummary> summaries,
                            const FixedPointConfig& config) {
  std::vector<Eigen::VectorXd> means;
  std::vector<SymMatrix> covs;
  for (const auto& s : summaries) {
    means.push_back(s.mean);
    covs.push_back(s.cov);
  }
  BarycenterResult r = barycenter_cov_fixed_point(covs, config);
  r.mean = barycenter_mean(means);
  return r;
}

double barycenter_residual(const SymMatrix& bary_cov,
                           std::span<const SymMatrix> covs) {
  if (covs.empty()) throw ValidationError("barycenter_residual of an empty list");
  const SymMatrix root = psd_sqrt(bary_cov);
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(bary_cov.dim(), bary_cov.dim());
  for (const auto& c : covs) {
    if (c.dim() != bary_cov.dim()) {
      throw ValidationError("barycenter_residual: dimension mismatch");
    }
    avg += psd_sqrt(SymMatrix(root.matrix() * c.matrix() * root.matrix())).matrix();
  }
  avg /= static_cast<double>(covs.size());
  return (bary_cov.matrix() - avg).norm();
}

CombinedPosterior wasp_transform(std::span<const DrawMatrix> subset_draws,
                                 std::span<const MomentSummary> summaries,
                                 const BarycenterResult& bary,
                                 std::optional<double> clamp_tol) {
  check_subsets(subset_draws, summaries);
  const Eigen::Index d = subset_draws[0].dim();
  if (bary.mean.size() != d || bary.cov.dim() != d) {
    throw ValidationError("wasp_transform: barycenter dimension mismatch");
  }
  CombinedPosterior out;
  out.method = CombineMethod::wasp;
  out.draws = stacked_shell(subset_draws);
  out.mean = bary.mean;
  out.cov = bary.cov;
  out.barycenter = bary;

  const SymMatrix bary_root = psd_sqrt(bary.cov, clamp_tol);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < subset_draws.size(); ++j) {
    SymMatrix inv_root;
    try {
      inv_root = psd_inv_sqrt(summaries[j].cov, clamp_tol);
    } catch (const SingularMatrixError& e) {
      std::ostringstream os;
      os << "subset " << j + 1 << " covariance is singular: " << e.what();
      throw SingularMatrixError(os.str(), e.min_eigenvalue());
    }
    const Eigen::MatrixXd map = bary_root.matrix() * inv_root.matrix();
    const Eigen::MatrixXd& theta = subset_draws[j].draws;
    const Eigen::MatrixXd centered = theta.rowwise() - summaries[j].mean.transpose();
    out.draws.draws.middleRows(row, theta.rows()) =
        (centered * map.transpose()).rowwise() + bary.mean.transpose();
    row += theta.rows();
  }
  return out;
}

CombinedPosterior dpmc_combine(std::span<const DrawMatrix> subset_draws,
                               std::span<const MomentSummary> summaries) {
  check_subsets(subset_draws, summaries);
  const Eigen::Index d = subset_draws[0].dim();
  std::vector<Eigen::VectorXd> means;
  Eigen::MatrixXd cov_avg = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : summaries) {
    means.push_back(s.mean);
    cov_avg += s.cov.matrix();
  }
  cov_avg /= static_cast<double>(summaries.size());

  CombinedPosterior out;
  out.method = CombineMethod::dpmc;
  out.draws = stacked_shell(subset_draws);
  out.mean = barycenter_mean(means);
  out.cov = SymMatrix(cov_avg);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < subset_draws.size(); ++j) {
    const Eigen::MatrixXd& theta = subset_draws[j].draws;
    const Eigen::VectorXd shift = out.mean - summaries[j].mean;
    out.draws.draws.middleRows(row, theta.rows()) =
        theta.rowwise() + shift.transpose();
    row += theta.rows();
  }
  return out;
}

CombinedPosterior combine(CombineMethod method,
                          std::span<const DrawMatrix> subset_draws,
                          const FixedPointConfig& config) {
  std::vector<MomentSummary> summaries;
  summaries.reserve(subset_draws.size());
  for (const auto& dm : subset_draws) summaries.push_back(moment_summary(dm));
  if (method == CombineMethod::dpmc) return dpmc_combine(subset_draws, summaries);
  const BarycenterResult bary = barycenter(summaries, config);
  return wasp_transform(subset_draws, summaries, bary, config.clamp_tol);
}

}  // namespace lswasp
