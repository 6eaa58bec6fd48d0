#pragma once

// Subset posterior moments, the 2-Wasserstein barycenter of location-scatter
// laws, and the two draw-combination rules (WASP transform and DPMC
// recentering).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lswasp/draw_matrix.hpp"
#include "lswasp/psd_linalg.hpp"

namespace lswasp {

/// Mean and covariance of a set of draws. The covariance uses the 1/T
/// normalization, not 1/(T - 1).
struct MomentSummary {
  Eigen::VectorXd mean;
  SymMatrix cov;
  Eigen::Index n_draws = 0;

  MomentSummary restrict_to(const std::vector<Eigen::Index>& coords) const;
};

struct FixedPointConfig {
  double tol = 1e-10;  // relative Frobenius step
  int max_iter = 100;
  std::optional<double> clamp_tol;  // eigenvalue floor for square roots

  void validate() const;
};

struct BarycenterResult {
  Eigen::VectorXd mean;
  SymMatrix cov;
  int iterations_used = 0;
  double final_step_norm = 0.0;
  bool converged = false;
};

enum class CombineMethod { wasp, dpmc };

std::string to_string(CombineMethod m);
CombineMethod parse_combine_method(const std::string& s);

struct CombinedPosterior {
  CombineMethod method = CombineMethod::wasp;
  DrawMatrix draws;  // kT rows, block j holds subset j
  Eigen::VectorXd mean;
  SymMatrix cov;
  std::optional<BarycenterResult> barycenter;  // wasp only
};

MomentSummary moment_summary(const DrawMatrix& draws);
MomentSummary moment_summary(const Eigen::MatrixXd& draws);

Eigen::VectorXd barycenter_mean(std::span<const Eigen::VectorXd> means);

/// Covariance of the barycenter of k location-scatter laws with equal
/// weights, by the fixed-point iteration started from the identity:
///
///   K_t     = (1/k) sum_j (S_t^1/2 C_j S_t^1/2)^1/2
///   S_{t+1} = S_t^-1/2 M_t M_t^T S_t^-1/2,   M_t = S_t^1/2 K_t S_t^-1/2
///
/// where M_t is the average of the principal roots (S_t C_j)^1/2. The
/// product simplifies to K_t S_t^-1 K_t. Stops once
/// |S_{t+1} - S_t|_F / |S_t|_F <= tol. Non-convergence is reported through
/// `converged`, not thrown. The returned mean is empty; pair it with
/// barycenter_mean. A single input is returned as is, with 0 iterations.
BarycenterResult barycenter_cov_fixed_point(std::span<const SymMatrix> covs,
                                            const FixedPointConfig& config = {});

/// Mean and covariance of the barycenter of the given summaries.
BarycenterResult barycenter(std::span<const MomentSummary> summaries,
                            const FixedPointConfig& config = {});

/// |S - (1/k) sum_j (S^1/2 C_j S^1/2)^1/2|_F.
double barycenter_residual(const SymMatrix& bary_cov,
                           std::span<const SymMatrix> covs);

/// Row (j-1)T + t is mu_bar + S_bar^1/2 S_j^-1/2 (theta_j^(t) - mu_j).
/// Throws SingularMatrixError naming the subset if some S_j is singular.
CombinedPosterior wasp_transform(std::span<const DrawMatrix> subset_draws,
                                 std::span<const MomentSummary> summaries,
                                 const BarycenterResult& bary,
                                 std::optional<double> clamp_tol = std::nullopt);

/// Row (j-1)T + t is theta_j^(t) - mu_j + mu_bar (common recentering).
CombinedPosterior dpmc_combine(std::span<const DrawMatrix> subset_draws,
                               std::span<const MomentSummary> summaries);

/// Summaries, barycenter and transform in one call.
CombinedPosterior combine(CombineMethod method,
                          std::span<const DrawMatrix> subset_draws,
                          const FixedPointConfig& config = {});

}  // namespace lswasp
