#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lswasp/draw_matrix.hpp"
#include "lswasp/glm_models.hpp"
#include "lswasp/psd_linalg.hpp"
#include "lswasp/rng.hpp"

namespace lswasp {

/// Chain length protocol. Retained rows (1-indexed) are burn_in + t * thin
/// for t = 1 .. T, with T = (total_iters - burn_in) / thin.
struct ChainConfig {
  int total_iters = 10000;
  int burn_in = 5000;
  int thin = 5;
  std::uint64_t seed = 1;

  void validate() const;
  int retained() const { return (total_iters - burn_in) / thin; }
  ChainConfig with_seed(std::uint64_t s) const {
    ChainConfig c = *this;
    c.seed = s;
    return c;
  }
};

/// Burn-in removal and thinning. `raw` must hold at least total_iters rows;
/// row t of the result is raw row burn_in + t * thin (1-indexed).
DrawMatrix postprocess_chain(const DrawMatrix& raw, const ChainConfig& cfg);

/// Multivariate t posterior of a linear model under the sigma^-2 prior with
/// the likelihood raised to `power`:
///   beta ~ t_nu(beta_hat, scale),  nu = power * m - p,
///   scale = s2 * (power * X'X)^-1,  s2 = power * RSS / nu.
struct LinearPosterior {
  Eigen::VectorXd location;
  SymMatrix scale;
  double df = 0.0;
  double s2 = 0.0;

  /// scale * nu / (nu - 2)
  SymMatrix covariance() const;
};

/// Throws SingularMatrixError for rank-deficient X and ValidationError when
/// m <= p + 2.
LinearPosterior conjugate_linear_posterior(const Dataset& data, double power);

/// cfg.retained() i.i.d. draws from conjugate_linear_posterior.
DrawMatrix conjugate_linear_sampler(const Dataset& data, double power,
                                    const ChainConfig& cfg);

/// Multivariate t draw using a precomputed square root of the scale.
class MultivariateT {
 public:
  MultivariateT(double df, Eigen::VectorXd loc, const SymMatrix& scale);
  Eigen::VectorXd operator()(Rng& rng) const;

 private:
  double df_;
  Eigen::VectorXd loc_;
  Eigen::MatrixXd root_;
};

/// One draw loc + scale^1/2 z sqrt(df / chi2_df).
Eigen::VectorXd mvt_sample(double df, const Eigen::VectorXd& loc, const SymMatrix& scale,
                           Rng& rng);

/// Polya-Gamma PG(1, c) by the alternating-series accept/reject sampler.
double sample_pg1(double c, Rng& rng);

/// PG(b, c) as a sum of b independent PG(1, c) draws.
double sample_pg(int b, double c, Rng& rng);

/// E[PG(b, c)] = b / (2c) tanh(c / 2), with the limit b / 4 at c = 0.
double pg_mean(double b, double c);
/// Var[PG(b, c)] = b (sinh c - c) / (4 c^3 cosh^2(c/2)), limit b / 24 at c = 0.
double pg_variance(double b, double c);

/// Gibbs sampler for binomial-logistic regression with Polya-Gamma
/// augmentation. Each sweep draws omega_i ~ PG(s_i, |x_i'beta|) and then
///   beta ~ N(V (power X'kappa + P0 mu0), V),
///   V = (power X' Omega X + P0)^-1,  kappa_i = y_i - s_i / 2,
/// where P0 is the prior precision. power = 1 is the ordinary sampler.
DrawMatrix pg_da_sampler(const Dataset& data, const GaussianPrior& prior, double power,
                         const ChainConfig& cfg);

/// kappa_i = y_i - s_i / 2
Eigen::VectorXd pg_kappa(const Dataset& data);

struct MhOptions {
  double target_acceptance = 0.234;
  /// Initial proposal covariance; if empty, a scaled inverse Hessian at
  /// `init` is tried (when a gradient is supplied), then a small identity.
  std::optional<Eigen::MatrixXd> initial_proposal;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::vector<std::string> param_names;
};

/// Random-walk Metropolis with Gaussian proposals. During burn-in the
/// proposal scale is tuned toward the target acceptance rate and the
/// proposal shape follows the running covariance of the chain; both are
/// frozen afterwards. Diagnostics carry the post-burn-in acceptance rate.
DrawMatrix adaptive_mh_sampler(const std::function<double(const Eigen::VectorXd&)>& logpost,
                               const Eigen::VectorXd& init, const ChainConfig& cfg,
                               const MhOptions& options = {});

/// Posterior draws for any family on the given data: the conjugate sampler
/// for linear models, Polya-Gamma Gibbs for logistic models and adaptive
/// Metropolis for negative-binomial and multinomial models.
DrawMatrix sample_posterior(const Dataset& data, const GlmSpec& spec,
                            const ChainConfig& cfg);

/// Adaptive Metropolis on log_posterior_pow for any family (starting at
/// beta = 0 and log-scale nuisance parameters at 0).
DrawMatrix mh_posterior(const Dataset& data, const GlmSpec& spec, const ChainConfig& cfg);

}  // namespace lswasp
