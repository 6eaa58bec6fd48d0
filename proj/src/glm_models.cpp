#include "lswasp/glm_models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "lswasp/draw_matrix.hpp"
#include "lswasp/errors.hpp"
#include "lswasp/rng.hpp"

namespace lswasp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

bool has_extra(Family f) {
  return f == Family::linear || f == Family::negative_binomial;
}

double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double lgam(double x) { return boost::math::lgamma(x); }

Eigen::Index category_count(const Dataset& data) {
  if (!data.n_categories) {
    throw ValidationError("multinomial data needs n_categories");
  }
  return *data.n_categories;
}

// Per-row constants that do not depend on the parameters.
double data_constant(Family family, const Dataset& data) {
  double c = 0.0;
  const Eigen::Index n = data.n();
  switch (family) {
    case Family::linear:
      c = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
      break;
    case Family::logistic_binomial:
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = (*data.trials)(i);
        const double y = data.y(i);
        c += lgam(s + 1.0) - lgam(y + 1.0) - lgam(s - y + 1.0);
      }
      break;
    case Family::negative_binomial:
      for (Eigen::Index i = 0; i < n; ++i) c -= lgam(data.y(i) + 1.0);
      break;
    case Family::multinomial_logistic:
      break;
  }
  return c;
}

double multinomial_ll(const Eigen::VectorXd& beta, const Dataset& data) {
  const Eigen::Index j_count = category_count(data);
  const Eigen::Index p = data.p();
  if (beta.size() != (j_count - 1) * p) {
    throw ValidationError("multinomial coefficients have wrong dimension");
  }
  const Eigen::Map<const Eigen::MatrixXd> b(beta.data(), p, j_count - 1);
  const Eigen::MatrixXd eta = data.X * b;  // n x (J-1)
  double ll = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const auto yi = static_cast<Eigen::Index>(data.y(i));
    if (yi < 1 || yi > j_count) {
      std::ostringstream os;
      os << "category " << yi << " at row " << i + 1 << " outside 1.." << j_count;
      throw ValidationError(os.str());
    }
    const double m = std::max(0.0, eta.row(i).maxCoeff());
    const double lse = m + std::log(std::exp(-m) + (eta.row(i).array() - m).exp().sum());
    ll += (yi == j_count ? 0.0 : eta(i, yi - 1)) - lse;
  }
  return ll;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::linear: return "linear";
    case Family::logistic_binomial: return "logistic";
    case Family::negative_binomial: return "negbin";
    case Family::multinomial_logistic: return "multinomial";
  }
  return "unknown";
}

Family parse_family(const std::string& s) {
  if (s == "linear") return Family::linear;
  if (s == "logistic" || s == "logistic_binomial") return Family::logistic_binomial;
  if (s == "negbin" || s == "negative_binomial") return Family::negative_binomial;
  if (s == "multinomial" || s == "multinomial_logistic") {
    return Family::multinomial_logistic;
  }
  throw ValidationError("unknown family '" + s +
                        "' (expected linear, logistic, negbin or multinomial)");
}

void Dataset::validate(Family family) const {
  const Eigen::Index n = X.rows();
  if (n < 1 || X.cols() < 1) throw ValidationError("dataset is empty");
  if (y.size() != n) {
    std::ostringstream os;
    os << "y has " << y.size() << " rows but X has " << n;
    throw ValidationError(os.str());
  }
  if (trials && trials->size() != n) {
    throw ValidationError("trials and X differ in row count");
  }
  if (!X.allFinite() || !y.allFinite()) throw ValidationError("dataset has non-finite values");
  auto bad_row = [](Eigen::Index i, const std::string& why) {
    std::ostringstream os;
    os << "row " << i + 1 << ": " << why;
    throw ValidationError(os.str());
  };
  switch (family) {
    case Family::linear:
      break;
    case Family::logistic_binomial:
      if (!trials) throw ValidationError("binomial data needs a trials column");
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = (*trials)(i);
        if (!is_integer(s) || s < 1) bad_row(i, "trials must be a positive integer");
        if (!is_integer(y(i)) || y(i) < 0 || y(i) > s) {
          bad_row(i, "binomial response must be an integer in [0, trials]");
        }
      }
      break;
    case Family::negative_binomial:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!is_integer(y(i)) || y(i) < 0) bad_row(i, "count must be a non-negative integer");
      }
      break;
    case Family::multinomial_logistic: {
      if (!n_categories || *n_categories < 2) {
        throw ValidationError("multinomial data needs n_categories >= 2");
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!is_integer(y(i)) || y(i) < 1 || y(i) > *n_categories) {
          bad_row(i, "category must be an integer in [1, n_categories]");
        }
      }
      break;
    }
  }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.y.resize(m);
  out.X.resize(m, X.cols());
  if (trials) out.trials = Eigen::VectorXd(m);
  out.n_categories = n_categories;
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index src = rows[static_cast<std::size_t>(r)];
    out.y(r) = y(src);
    out.X.row(r) = X.row(src);
    if (trials) (*out.trials)(r) = (*trials)(src);
  }
  return out;
}

PriorSpec PriorSpec::default_for(Family family, Eigen::Index coef_dim, double variance) {
  PriorSpec prior;
  if (family == Family::linear) {
    prior.kind = ImproperLinearPrior{};
  } else {
    prior.kind = GaussianPrior{Eigen::VectorXd::Zero(coef_dim),
                               variance * SymMatrix::identity(coef_dim)};
  }
  if (family == Family::negative_binomial) prior.negbin_dispersion = HalfNormalPrior{};
  return prior;
}

void GlmSpec::validate() const {
  if (!(power >= 1.0) || !std::isfinite(power)) {
    throw ValidationError("likelihood power must be a finite value >= 1");
  }
  if (family == Family::logistic_binomial &&
      std::holds_alternative<ImproperLinearPrior>(prior.kind)) {
    throw ValidationError("logistic regression needs a Gaussian coefficient prior");
  }
  if (family == Family::multinomial_logistic &&
      std::holds_alternative<ImproperLinearPrior>(prior.kind)) {
    throw ValidationError("multinomial regression needs a Gaussian coefficient prior");
  }
  if (family == Family::negative_binomial &&
      std::holds_alternative<ImproperLinearPrior>(prior.kind)) {
    throw ValidationError("negative binomial regression needs a Gaussian coefficient prior");
  }
  if (const auto* g = std::get_if<GaussianPrior>(&prior.kind)) {
    if (g->mean.size() != g->cov.dim()) {
      throw ValidationError("Gaussian prior mean and covariance differ in dimension");
    }
  }
  if (prior.negbin_dispersion && !(prior.negbin_dispersion->scale > 0.0)) {
    throw ValidationError("half-normal dispersion scale must be > 0");
  }
}

Eigen::VectorXd ParamVector::flatten() const {
  Eigen::VectorXd out(beta.size() + (log_extra ? 1 : 0));
  out.head(beta.size()) = beta;
  if (log_extra) out(beta.size()) = *log_extra;
  return out;
}

ParamVector ParamVector::unflatten(Family family, const Eigen::VectorXd& flat) {
  ParamVector pv;
  if (has_extra(family)) {
    if (flat.size() < 2) throw ValidationError("parameter vector too short");
    pv.beta = flat.head(flat.size() - 1);
    pv.log_extra = flat(flat.size() - 1);
  } else {
    pv.beta = flat;
  }
  return pv;
}

Eigen::Index coefficient_dim(Family family, const Dataset& data) {
  if (family == Family::multinomial_logistic) {
    return (category_count(data) - 1) * data.p();
  }
  return data.p();
}

Eigen::Index parameter_dim(Family family, const Dataset& data) {
  return coefficient_dim(family, data) + (has_extra(family) ? 1 : 0);
}

std::vector<std::string> parameter_names(Family family, const Dataset& data) {
  std::vector<std::string> names;
  if (family == Family::multinomial_logistic) {
    const Eigen::Index j_count = category_count(data);
    for (Eigen::Index j = 1; j < j_count; ++j) {
      for (Eigen::Index c = 1; c <= data.p(); ++c) {
        names.push_back("beta" + std::to_string(j) + "_" + std::to_string(c));
      }
    }
    return names;
  }
  names = indexed_names("beta", data.p());
  if (family == Family::linear) names.emplace_back("log_sigma2");
  if (family == Family::negative_binomial) names.emplace_back("log_phi");
  return names;
}

PosteriorEvaluator::PosteriorEvaluator(GlmSpec spec, const Dataset& data)
    : spec_(std::move(spec)), data_(data) {
  spec_.validate();
  data_.validate(spec_.family);
  dim_ = parameter_dim(spec_.family, data_);
  const Eigen::Index coef_dim = coefficient_dim(spec_.family, data_);
  if (const auto* g = std::get_if<GaussianPrior>(&spec_.prior.kind)) {
    if (g->mean.size() != coef_dim) {
      std::ostringstream os;
      os << "Gaussian prior has dimension " << g->mean.size() << ", model has "
         << coef_dim << " coefficients";
      throw ValidationError(os.str());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g->cov.matrix());
    if (llt.info() != Eigen::Success) {
      throw NotPsdError("Gaussian prior covariance is not positive definite", 0.0);
    }
    gaussian_ = true;
    prior_mean_ = g->mean;
    prior_precision_ = llt.solve(Eigen::MatrixXd::Identity(coef_dim, coef_dim));
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    prior_log_norm_ = -0.5 * (static_cast<double>(coef_dim) *
                                  std::log(2.0 * std::numbers::pi) +
                              log_det);
  }
  data_constant_ = data_constant(spec_.family, data_);
  if (spec_.family == Family::negative_binomial) {
    log_y_factorial_.resize(data_.n());
    for (Eigen::Index i = 0; i < data_.n(); ++i) {
      log_y_factorial_(i) = lgam(data_.y(i) + 1.0);
    }
  }
}

double PosteriorEvaluator::log_prior(const ParamVector& theta) const {
  double lp = 0.0;
  if (gaussian_) {
    const Eigen::VectorXd diff = theta.beta - prior_mean_;
    lp += prior_log_norm_ - 0.5 * diff.dot(prior_precision_ * diff);
  }
  if (spec_.family == Family::negative_binomial) {
    const double u = *theta.log_extra;
    const double phi = std::exp(u);
    const double s = spec_.prior.negbin_dispersion.value_or(HalfNormalPrior{}).scale;
    // half-normal density on phi, plus log |d phi / d u| = u
    lp += std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi * s * s) -
          0.5 * phi * phi / (s * s) + u;
  }
  // Linear: sigma^-2 on sigma^2 is flat in log sigma^2.
  return lp;
}

double PosteriorEvaluator::log_lik(const ParamVector& theta) const {
  const Dataset& d = data_;
  switch (spec_.family) {
    case Family::linear: {
      const double u = *theta.log_extra;
      const double rss = (d.y - d.X * theta.beta).squaredNorm();
      return data_constant_ - 0.5 * static_cast<double>(d.n()) * u -
             0.5 * rss * std::exp(-u);
    }
    case Family::logistic_binomial: {
      const Eigen::VectorXd eta = d.X * theta.beta;
      double ll = data_constant_;
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        ll += d.y(i) * eta(i) - (*d.trials)(i) * log1p_exp(eta(i));
      }
      return ll;
    }
    case Family::negative_binomial: {
      const double phi = std::exp(*theta.log_extra);
      if (!(phi > 0.0) || !std::isfinite(phi)) return kNegInf;
      const Eigen::VectorXd eta = d.X * theta.beta;
      const double lg_phi = lgam(phi);
      const double log_phi = std::log(phi);
      double ll = data_constant_;
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        const double y = d.y(i);
        // log(mu + phi) computed stably from eta
        const double log_mu_phi = eta(i) > log_phi
                                      ? eta(i) + std::log1p(std::exp(log_phi - eta(i)))
                                      : log_phi + std::log1p(std::exp(eta(i) - log_phi));
        ll += lgam(y + phi) - lg_phi + phi * (log_phi - log_mu_phi) +
              y * (eta(i) - log_mu_phi);
      }
      return ll;
    }
    case Family::multinomial_logistic:
      return multinomial_ll(theta.beta, d);
  }
  return kNegInf;
}

Eigen::VectorXd PosteriorEvaluator::log_lik_grad(const ParamVector& theta) const {
  const Dataset& d = data_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  switch (spec_.family) {
    case Family::linear: {
      const double u = *theta.log_extra;
      const Eigen::VectorXd resid = d.y - d.X * theta.beta;
      const double inv_var = std::exp(-u);
      g.head(d.p()) = d.X.transpose() * resid * inv_var;
      g(d.p()) = -0.5 * static_cast<double>(d.n()) + 0.5 * resid.squaredNorm() * inv_var;
      break;
    }
    case Family::logistic_binomial: {
      const Eigen::VectorXd eta = d.X * theta.beta;
      Eigen::VectorXd r(d.n());
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        r(i) = d.y(i) - (*d.trials)(i) * sigmoid(eta(i));
      }
      g = d.X.transpose() * r;
      break;
    }
    case Family::negative_binomial: {
      const double phi = std::exp(*theta.log_extra);
      const Eigen::VectorXd eta = d.X * theta.beta;
      const double dg_phi = boost::math::digamma(phi);
      Eigen::VectorXd r(d.n());
      double dphi = 0.0;
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        const double y = d.y(i);
        const double mu = std::exp(eta(i));
        const double w = phi / (mu + phi);
        r(i) = w * (y - mu);
        dphi += boost::math::digamma(y + phi) - dg_phi + std::log(w) + 1.0 -
                (y + phi) / (mu + phi);
      }
      g.head(d.p()) = d.X.transpose() * r;
      g(d.p()) = phi * dphi;
      break;
    }
    case Family::multinomial_logistic: {
      const Eigen::Index j_count = category_count(d);
      const Eigen::Index p = d.p();
      const Eigen::Map<const Eigen::MatrixXd> b(theta.beta.data(), p, j_count - 1);
      const Eigen::MatrixXd eta = d.X * b;
      Eigen::MatrixXd resid(d.n(), j_count - 1);
      for (Eigen::Index i = 0; i < d.n(); ++i) {
        const double m = std::max(0.0, eta.row(i).maxCoeff());
        const Eigen::ArrayXd e = (eta.row(i).array() - m).exp().transpose();
        const double denom = std::exp(-m) + e.sum();
        const auto yi = static_cast<Eigen::Index>(d.y(i));
        for (Eigen::Index j = 0; j < j_count - 1; ++j) {
          resid(i, j) = (yi == j + 1 ? 1.0 : 0.0) - e(j) / denom;
        }
      }
      const Eigen::MatrixXd gm = d.X.transpose() * resid;  // p x (J-1)
      g = Eigen::Map<const Eigen::VectorXd>(gm.data(), gm.size());
      break;
    }
  }
  return g;
}

double PosteriorEvaluator::operator()(const Eigen::VectorXd& flat) const {
  if (flat.size() != dim_) {
    std::ostringstream os;
    os << "parameter vector has dimension " << flat.size() << ", expected " << dim_;
    throw ValidationError(os.str());
  }
  if (!flat.allFinite()) return kNegInf;
  const ParamVector theta = ParamVector::unflatten(spec_.family, flat);
  const double ll = log_lik(theta);
  if (!std::isfinite(ll)) return kNegInf;
  const double v = spec_.power * ll + log_prior(theta);
  return std::isnan(v) ? kNegInf : v;
}

Eigen::VectorXd PosteriorEvaluator::gradient(const Eigen::VectorXd& flat) const {
  if (flat.size() != dim_) throw ValidationError("gradient: parameter dimension mismatch");
  const ParamVector theta = ParamVector::unflatten(spec_.family, flat);
  Eigen::VectorXd g = spec_.power * log_lik_grad(theta);
  const Eigen::Index coef_dim = coefficient_dim(spec_.family, data_);
  if (gaussian_) g.head(coef_dim) -= prior_precision_ * (theta.beta - prior_mean_);
  if (spec_.family == Family::negative_binomial) {
    const double phi = std::exp(*theta.log_extra);
    const double s = spec_.prior.negbin_dispersion.value_or(HalfNormalPrior{}).scale;
    g(coef_dim) += -phi * phi / (s * s) + 1.0;
  }
  return g;
}

double log_likelihood(Family family, const ParamVector& theta, const Dataset& data) {
  GlmSpec spec;
  spec.family = family;
  spec.prior = PriorSpec::default_for(family, coefficient_dim(family, data));
  const PosteriorEvaluator eval(spec, data);
  return eval(theta.flatten()) - eval.log_prior(theta);
}

double log_posterior_pow(const GlmSpec& spec, const ParamVector& theta,
                         const Dataset& data) {
  const PosteriorEvaluator eval(spec, data);
  return eval(theta.flatten());
}

double log_prior(const GlmSpec& spec, const ParamVector& theta) {
  spec.validate();
  double lp = 0.0;
  if (const auto* g = std::get_if<GaussianPrior>(&spec.prior.kind)) {
    if (g->mean.size() != theta.beta.size()) {
      throw ValidationError("Gaussian prior and coefficients differ in dimension");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g->cov.matrix());
    if (llt.info() != Eigen::Success) {
      throw NotPsdError("Gaussian prior covariance is not positive definite", 0.0);
    }
    const Eigen::VectorXd z = llt.matrixL().solve(theta.beta - g->mean);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    lp += -0.5 * (static_cast<double>(z.size()) * std::log(2.0 * std::numbers::pi) +
                  log_det + z.squaredNorm());
  }
  if (spec.family == Family::negative_binomial) {
    if (!theta.log_extra) throw ValidationError("negative binomial needs log phi");
    const double u = *theta.log_extra;
    const double phi = std::exp(u);
    const double s = spec.prior.negbin_dispersion.value_or(HalfNormalPrior{}).scale;
    lp += std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi * s * s) -
          0.5 * phi * phi / (s * s) + u;
  }
  return lp;
}

Eigen::VectorXd log_posterior_pow_grad(const GlmSpec& spec, const ParamVector& theta,
                                       const Dataset& data) {
  return PosteriorEvaluator(spec, data).gradient(theta.flatten());
}

double multinomial_logit_loglik(const ParamVector& betas, const Dataset& data,
                                double power) {
  if (!data.n_categories) throw ValidationError("multinomial data needs n_categories");
  return power * multinomial_ll(betas.beta, data);
}

Eigen::VectorXd alternating_pattern(Eigen::Index p, double magnitude) {
  Eigen::VectorXd b(p);
  for (Eigen::Index i = 0; i < p; ++i) b(i) = (i % 2 == 0) ? -magnitude : magnitude;
  return b;
}

namespace {

Eigen::MatrixXd gaussian_design(Rng& rng, Eigen::Index n, Eigen::Index p) {
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = standard_normal(rng);
  }
  return X;
}

void check_np(Eigen::Index n, Eigen::Index p) {
  if (n < 1 || p < 1) throw ValidationError("simulation needs n >= 1 and p >= 1");
}

}  // namespace

SimulatedData simulate_logistic(Eigen::Index n, Eigen::Index p, int trials_per_sample,
                                std::uint64_t seed,
                                std::optional<Eigen::VectorXd> beta_override) {
  check_np(n, p);
  if (trials_per_sample < 1) throw ValidationError("trials_per_sample must be >= 1");
  const Eigen::VectorXd beta = beta_override.value_or(alternating_pattern(p, 2.0));
  if (beta.size() != p) throw ValidationError("beta override has wrong dimension");
  Rng rng = make_rng(seed);
  SimulatedData out;
  out.data.X = gaussian_design(rng, n, p);
  out.data.trials = Eigen::VectorXd::Constant(n, trials_per_sample);
  out.data.y.resize(n);
  const Eigen::VectorXd eta = out.data.X * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    boost::random::binomial_distribution<int, double> binom(trials_per_sample,
                                                            sigmoid(eta(i)));
    out.data.y(i) = binom(rng);
  }
  out.truth.beta = beta;
  return out;
}

SimulatedData simulate_negbin(Eigen::Index n, Eigen::Index p, std::uint64_t seed,
                              double phi) {
  check_np(n, p);
  if (!(phi > 0.0)) throw ValidationError("dispersion phi must be > 0");
  const Eigen::VectorXd beta = alternating_pattern(p, 1.0);
  Rng rng = make_rng(seed);
  SimulatedData out;
  out.data.X = gaussian_design(rng, n, p);
  out.data.y.resize(n);
  const Eigen::VectorXd eta = out.data.X * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    // NB2 as a gamma-Poisson mixture: lambda ~ Gamma(phi, mu / phi)
    const double lambda = gamma_variate(rng, phi, std::exp(eta(i)) / phi);
    boost::random::poisson_distribution<std::int64_t, double> pois(
        std::max(lambda, 1e-300));
    out.data.y(i) = static_cast<double>(pois(rng));
  }
  out.truth.beta = beta;
  out.truth.log_extra = std::log(phi);
  return out;
}

SimulatedData simulate_linear(Eigen::Index n, Eigen::Index p, double sigma,
                              std::uint64_t seed) {
  check_np(n, p);
  if (!(sigma > 0.0)) throw ValidationError("sigma must be > 0");
  const Eigen::VectorXd beta = alternating_pattern(p, 2.0);
  Rng rng = make_rng(seed);
  SimulatedData out;
  out.data.X = gaussian_design(rng, n, p);
  out.data.y = out.data.X * beta;
  for (Eigen::Index i = 0; i < n; ++i) out.data.y(i) += sigma * standard_normal(rng);
  out.truth.beta = beta;
  out.truth.log_extra = 2.0 * std::log(sigma);
  return out;
}

SimulatedData simulate_multinomial(Eigen::Index n, Eigen::Index p, int n_categories,
                                   std::uint64_t seed) {
  check_np(n, p);
  if (n_categories < 2) throw ValidationError("n_categories must be >= 2");
  const Eigen::Index blocks = n_categories - 1;
  Eigen::VectorXd beta(blocks * p);
  for (Eigen::Index j = 0; j < blocks; ++j) {
    beta.segment(j * p, p) =
        alternating_pattern(p, static_cast<double>(j + 1) / n_categories);
  }
  Rng rng = make_rng(seed);
  SimulatedData out;
  out.data.X = gaussian_design(rng, n, p);
  out.data.n_categories = n_categories;
  out.data.y.resize(n);
  const Eigen::Map<const Eigen::MatrixXd> b(beta.data(), p, blocks);
  const Eigen::MatrixXd eta = out.data.X * b;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd w(n_categories);
    w.head(blocks) = eta.row(i).transpose().array().exp();
    w(blocks) = 1.0;
    const double u = uniform01(rng) * w.sum();
    double acc = 0.0;
    int cat = n_categories;
    for (int j = 0; j < n_categories; ++j) {
      acc += w(j);
      if (u < acc) {
        cat = j + 1;
        break;
      }
    }
    out.data.y(i) = cat;
  }
  out.truth.beta = beta;
  return out;
}

}  // namespace lswasp
