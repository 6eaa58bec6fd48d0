#pragma once

// Accuracy and cost metrics for combined posteriors.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lswasp/barycenter.hpp"

namespace lswasp {

/// sqrt(|mu_full - mu_approx|^2 + d(S_full, S_approx)^2)
double approximation_error(const MomentSummary& full, const MomentSummary& approx);

/// t_full / t_dnc; both must be positive.
double computational_gain(double t_full, double t_dnc);

struct ScalingReport {
  bool monotone_decreasing = false;
  std::vector<std::pair<double, double>> sqrt_n_scaled;  // (n, sqrt(n) * error), sorted by n
};

/// Needs at least two distinct n.
ScalingReport scaling_diagnostic(std::vector<std::pair<double, double>> errors_by_n);

/// Error on each labeled block of coordinates, using marginal moments.
std::map<std::string, double> per_block_errors(
    const MomentSummary& full, const MomentSummary& approx,
    const std::map<std::string, std::vector<Eigen::Index>>& blocks);

/// Effective sample size of one chain (Geyer's initial monotone sequence).
double effective_sample_size(const Eigen::VectorXd& chain);
/// Column-wise ESS.
Eigen::VectorXd effective_sample_size(const Eigen::MatrixXd& draws);

struct EvalDiagnostics {
  bool barycenter_converged = true;
  double min_subset_eigenvalue = 0.0;
};

struct EvalReport {
  double approximation_error = 0.0;
  double computational_gain = 0.0;
  std::optional<std::map<std::string, double>> per_block_errors;
  EvalDiagnostics diagnostics;
};

}  // namespace lswasp
