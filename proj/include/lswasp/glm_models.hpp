#pragma once

// Generalized linear model likelihoods raised to a power (the n/m_j
// correction used on data subsets), their priors, and synthetic data
// generators.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lswasp/psd_linalg.hpp"

namespace lswasp {

enum class Family { linear, logistic_binomial, negative_binomial, multinomial_logistic };

std::string to_string(Family f);
Family parse_family(const std::string& s);

/// One GLM problem. Multinomial responses are category labels 1..J with J
/// the baseline; binomial responses carry their trial counts in `trials`.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::optional<Eigen::VectorXd> trials;
  std::optional<int> n_categories;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  /// Row counts agree and responses lie in the family's support.
  void validate(Family family) const;
  /// Rows in the given order.
  Dataset subset(std::span<const Eigen::Index> rows) const;
};

struct ImproperLinearPrior {};  // pi(beta, sigma^2) proportional to sigma^-2

struct GaussianPrior {
  Eigen::VectorXd mean;
  SymMatrix cov;
};

struct HalfNormalPrior {
  double scale = 5.0;
};

struct PriorSpec {
  std::variant<ImproperLinearPrior, GaussianPrior> kind;
  std::optional<HalfNormalPrior> negbin_dispersion;

  /// Improper prior for linear models; N(0, variance * I) on the
  /// coefficients otherwise, plus half-normal(5) on the NB dispersion.
  static PriorSpec default_for(Family family, Eigen::Index coef_dim,
                               double variance = 100.0);
};

struct GlmSpec {
  Family family = Family::logistic_binomial;
  PriorSpec prior;
  double power = 1.0;

  void validate() const;
};

/// Coefficients plus an optional log-scale nuisance parameter
/// (log sigma^2 for linear, log phi for negative binomial). Multinomial
/// coefficients are stacked category blocks beta_1 .. beta_{J-1}.
struct ParamVector {
  Eigen::VectorXd beta;
  std::optional<double> log_extra;

  Eigen::VectorXd flatten() const;
  static ParamVector unflatten(Family family, const Eigen::VectorXd& flat);
};

/// Number of regression coefficients for the family on this data.
Eigen::Index coefficient_dim(Family family, const Dataset& data);
/// Coefficients plus nuisance parameters, as sampled by the MH sampler.
Eigen::Index parameter_dim(Family family, const Dataset& data);
std::vector<std::string> parameter_names(Family family, const Dataset& data);

/// Unpowered log-likelihood (full normalizing constants included).
double log_likelihood(Family family, const ParamVector& theta, const Dataset& data);

/// power * log-likelihood + log prior, with the log-Jacobian of the
/// log-scale nuisance parameter. Returns -inf outside the support.
double log_posterior_pow(const GlmSpec& spec, const ParamVector& theta,
                         const Dataset& data);

/// Log prior density (with log-Jacobian) on the sampling scale.
double log_prior(const GlmSpec& spec, const ParamVector& theta);

/// Gradient of log_posterior_pow with respect to the flattened parameters.
Eigen::VectorXd log_posterior_pow_grad(const GlmSpec& spec, const ParamVector& theta,
                                       const Dataset& data);

/// log_posterior_pow over flattened parameters, with the prior precision
/// and normalizer cached. Holds a reference to `data`, which must outlive
/// the evaluator.
class PosteriorEvaluator {
 public:
  PosteriorEvaluator(GlmSpec spec, const Dataset& data);

  double operator()(const Eigen::VectorXd& flat) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& flat) const;
  double log_prior(const ParamVector& theta) const;
  Eigen::Index dim() const { return dim_; }
  const GlmSpec& spec() const { return spec_; }

 private:
  double log_lik(const ParamVector& theta) const;
  Eigen::VectorXd log_lik_grad(const ParamVector& theta) const;

  GlmSpec spec_;
  const Dataset& data_;
  Eigen::Index dim_ = 0;
  // Gaussian prior cache.
  bool gaussian_ = false;
  Eigen::VectorXd prior_mean_;
  Eigen::MatrixXd prior_precision_;
  double prior_log_norm_ = 0.0;
  // log C(s_i, y_i) or log y_i! summed over rows.
  double data_constant_ = 0.0;
  Eigen::VectorXd log_y_factorial_;
};

/// Powered multinomial-logistic log-likelihood with the last category as
/// the zero-coefficient baseline.
double multinomial_logit_loglik(const ParamVector& betas, const Dataset& data,
                                double power);

struct SimulatedData {
  Dataset data;
  ParamVector truth;
};

/// Coefficient pattern -a, a, -a, a, ...
Eigen::VectorXd alternating_pattern(Eigen::Index p, double magnitude);

/// X ~ N(0,1) entries; beta alternates -2, 2; y ~ Binom(s, logistic(x'beta)).
SimulatedData simulate_logistic(Eigen::Index n, Eigen::Index p, int trials_per_sample,
                                std::uint64_t seed,
                                std::optional<Eigen::VectorXd> beta_override = std::nullopt);

/// NB2 with mean exp(x'beta), beta alternating -1, 1, dispersion phi.
SimulatedData simulate_negbin(Eigen::Index n, Eigen::Index p, std::uint64_t seed,
                              double phi = 2.0);

/// y = X beta + N(0, sigma^2), beta alternating -2, 2.
SimulatedData simulate_linear(Eigen::Index n, Eigen::Index p, double sigma,
                              std::uint64_t seed);

/// Multinomial-logit responses in 1..J; block j of beta alternates
/// -(j / J), +(j / J). Used for tests and CLI demos.
SimulatedData simulate_multinomial(Eigen::Index n, Eigen::Index p, int n_categories,
                                   std::uint64_t seed);

}  // namespace lswasp
