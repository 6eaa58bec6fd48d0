#include "lswasp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lswasp/errors.hpp"
#include "lswasp/psd_linalg.hpp"

namespace lswasp {

double approximation_error(const MomentSummary& full, const MomentSummary& approx) {
  if (full.mean.size() != approx.mean.size()) {
    std::ostringstream os;
    os << "approximation_error: dimensions " << full.mean.size() << " and "
       << approx.mean.size() << " differ";
    throw ValidationError(os.str());
  }
  return std::sqrt(gaussian_w2_sq(full.mean, full.cov, approx.mean, approx.cov));
}

double computational_gain(double t_full, double t_dnc) {
  if (!(t_full > 0.0) || !(t_dnc > 0.0)) {
    throw ValidationError("computational gain needs positive wall clocks");
  }
  return t_full / t_dnc;
}

ScalingReport scaling_diagnostic(std::vector<std::pair<double, double>> errors_by_n) {
  if (errors_by_n.size() < 2) {
    throw ValidationError("scaling diagnostic needs at least 2 grid points");
  }
  std::sort(errors_by_n.begin(), errors_by_n.end());
  std::set<double> seen;
  for (const auto& [n, err] : errors_by_n) {
    if (!(n > 0.0)) throw ValidationError("grid sizes must be positive");
    if (!seen.insert(n).second) throw ValidationError("grid sizes must be distinct");
  }
  ScalingReport r;
  r.monotone_decreasing = true;
  for (std::size_t i = 1; i < errors_by_n.size(); ++i) {
    if (!(errors_by_n[i].second < errors_by_n[i - 1].second)) r.monotone_decreasing = false;
  }
  for (const auto& [n, err] : errors_by_n) r.sqrt_n_scaled.emplace_back(n, std::sqrt(n) * err);
  return r;
}

std::map<std::string, double> per_block_errors(
    const MomentSummary& full, const MomentSummary& approx,
    const std::map<std::string, std::vector<Eigen::Index>>& blocks) {
  std::map<std::string, double> out;
  for (const auto& [label, coords] : blocks) {
    for (Eigen::Index c : coords) {
      if (c < 0 || c >= full.mean.size()) {
        throw ValidationError("block '" + label + "' has an out-of-range coordinate");
      }
    }
    out[label] = approximation_error(full.restrict_to(coords), approx.restrict_to(coords));
  }
  return out;
}

double effective_sample_size(const Eigen::VectorXd& chain) {
  const Eigen::Index n = chain.size();
  if (n < 4) return static_cast<double>(n);
  const Eigen::VectorXd x = chain.array() - chain.mean();
  const double var0 = x.squaredNorm() / static_cast<double>(n);
  if (!(var0 > 0.0)) return static_cast<double>(n);
  auto rho = [&](Eigen::Index lag) {
    return x.head(n - lag).dot(x.tail(n - lag)) / static_cast<double>(n) / var0;
  };
  // Pair sums Gamma_m = rho(2m) + rho(2m+1), truncated at the first
  // non-positive one and forced monotone.
  double sum = 0.0;
  double prev = INFINITY;
  for (Eigen::Index m = 0; 2 * m + 1 < n; ++m) {
    double g = rho(2 * m) + rho(2 * m + 1);
    if (g <= 0.0) break;
    g = std::min(g, prev);
    prev = g;
    sum += g;
  }
  const double tau = std::max(2.0 * sum - 1.0, 1e-12);
  return std::min(static_cast<double>(n) / tau, static_cast<double>(n) * std::log10(static_cast<double>(n)));
}

Eigen::VectorXd effective_sample_size(const Eigen::MatrixXd& draws) {
  Eigen::VectorXd out(draws.cols());
  for (Eigen::Index j = 0; j < draws.cols(); ++j) out(j) = effective_sample_size(Eigen::VectorXd(draws.col(j)));
  return out;
}

}  // namespace lswasp
