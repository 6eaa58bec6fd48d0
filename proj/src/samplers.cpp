#include "lswasp/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lswasp/errors.hpp"

namespace lswasp {

void ChainConfig::validate() const {
  if (total_iters < 1) throw ValidationError("total_iters must be >= 1");
  if (burn_in < 0 || burn_in >= total_iters) {
    throw ValidationError("burn_in must satisfy 0 <= burn_in < total_iters");
  }
  if (thin < 1) throw ValidationError("thin must be >= 1");
  if (retained() < 2) {
    std::ostringstream os;
    os << "chain keeps " << retained() << " draws; at least 2 are required";
    throw ValidationError(os.str());
  }
}

DrawMatrix postprocess_chain(const DrawMatrix& raw, const ChainConfig& cfg) {
  cfg.validate();
  if (raw.rows() < cfg.total_iters) {
    std::ostringstream os;
    os << "raw chain has " << raw.rows() << " rows, fewer than total_iters "
       << cfg.total_iters;
    throw ValidationError(os.str());
  }
  const int t_keep = cfg.retained();
  DrawMatrix out;
  out.param_names = raw.param_names;
  out.diagnostics = raw.diagnostics;
  out.draws.resize(t_keep, raw.dim());
  for (int t = 1; t <= t_keep; ++t) {
    out.draws.row(t - 1) = raw.draws.row(cfg.burn_in + t * cfg.thin - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conjugate linear regression

SymMatrix LinearPosterior::covariance() const {
  return (df / (df - 2.0)) * scale;
}

LinearPosterior conjugate_linear_posterior(const Dataset& data, double power) {
  data.validate(Family::linear);
  if (!(power >= 1.0)) throw ValidationError("likelihood power must be >= 1");
  const Eigen::Index m = data.n();
  const Eigen::Index p = data.p();
  if (m <= p + 2) {
    std::ostringstream os;
    os << "linear posterior needs more than p + 2 = " << p + 2 << " rows, got " << m;
    throw ValidationError(os.str());
  }
  const SymMatrix gram(data.X.transpose() * data.X);
  const SymEigen eig = sym_eigen(gram);
  if (eig.values(0) <= 1e-12 * std::max(eig.values(p - 1), 1e-300)) {
    throw SingularMatrixError("design matrix is rank deficient", eig.values(0));
  }
  const Eigen::MatrixXd gram_inv =
      eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();

  LinearPosterior post;
  post.location = gram_inv * (data.X.transpose() * data.y);
  const double rss = (data.y - data.X * post.location).squaredNorm();
  post.df = power * static_cast<double>(m) - static_cast<double>(p);
  post.s2 = power * rss / post.df;
  post.scale = SymMatrix(post.s2 / power * gram_inv);
  return post;
}

DrawMatrix conjugate_linear_sampler(const Dataset& data, double power,
                                    const ChainConfig& cfg) {
  cfg.validate();
  const LinearPosterior post = conjugate_linear_posterior(data, power);
  const MultivariateT dist(post.df, post.location, post.scale);
  Rng rng = make_rng(cfg.seed);
  DrawMatrix out;
  out.param_names = indexed_names("beta", data.p());
  out.diagnostics.seed_used = cfg.seed;
  out.draws.resize(cfg.retained(), data.p());
  for (int t = 0; t < cfg.retained(); ++t) out.draws.row(t) = dist(rng).transpose();
  return out;
}

MultivariateT::MultivariateT(double df, Eigen::VectorXd loc, const SymMatrix& scale)
    : df_(df), loc_(std::move(loc)) {
  if (!(df > 0.0)) throw ValidationError("t degrees of freedom must be > 0");
  if (scale.dim() != loc_.size()) throw ValidationError("t location/scale dimension mismatch");
  root_ = psd_sqrt(scale).matrix();
}

Eigen::VectorXd MultivariateT::operator()(Rng& rng) const {
  Eigen::VectorXd z(loc_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
  const double chi2 = gamma_variate(rng, 0.5 * df_, 2.0);
  return loc_ + root_ * z * std::sqrt(df_ / chi2);
}

Eigen::VectorXd mvt_sample(double df, const Eigen::VectorXd& loc, const SymMatrix& scale,
                           Rng& rng) {
  return MultivariateT(df, loc, scale)(rng);
}

// ---------------------------------------------------------------------------
// Polya-Gamma

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;

// Proposal-mixture constants depend only on z = |c| / 2.
struct Pg1Proposal {
  double z = 0.0;
  double fz = 0.0;            // pi^2 / 8 + z^2 / 2
  double exp_mass = 0.0;      // probability of the truncated exponential piece
};

double log_norm_cdf(double x) {
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

Pg1Proposal make_pg1_proposal(double c) {
  Pg1Proposal p;
  p.z = 0.5 * std::abs(c);
  p.fz = 0.125 * kPi * kPi + 0.5 * p.z * p.z;
  const double rt = std::sqrt(1.0 / kTrunc);
  const double b = rt * (kTrunc * p.z - 1.0);
  const double a = -rt * (kTrunc * p.z + 1.0);
  const double x0 = std::log(p.fz) + p.fz * kTrunc;
  const double xb = x0 - p.z + log_norm_cdf(b);
  const double xa = x0 + p.z + log_norm_cdf(a);
  const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  p.exp_mass = 1.0 / (1.0 + q_over_p);
  return p;
}

// n-th term of the alternating series for the J*(1, z) density kernel.
double series_coef(int n, double x) {
  const double k = n + 0.5;
  if (x > kTrunc) return kPi * k * std::exp(-0.5 * k * k * kPi * kPi * x);
  if (x <= 0.0) return 0.0;
  return std::exp(-1.5 * std::log(0.5 * kPi * x) + std::log(kPi * k) - 2.0 * k * k / x);
}

// Inverse Gaussian IG(1/z, 1) truncated to (0, kTrunc].
double truncated_inv_gauss(double z, Rng& rng) {
  const double mu = 1.0 / z;  // inf when z == 0
  double x = kTrunc + 1.0;
  if (mu > kTrunc) {
    double alpha = 0.0;
    while (uniform01(rng) > alpha) {
      double e1 = standard_exponential(rng);
      double e2 = standard_exponential(rng);
      while (e1 * e1 > 2.0 * e2 / kTrunc) {
        e1 = standard_exponential(rng);
        e2 = standard_exponential(rng);
      }
      x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    while (x > kTrunc) {
      const double n = standard_normal(rng);
      const double y = n * n;
      const double my = mu * y;
      x = mu + 0.5 * mu * my - 0.5 * mu * std::sqrt(4.0 * my + my * my);
      if (uniform01(rng) > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

double draw_pg1(const Pg1Proposal& prop, Rng& rng) {
  for (;;) {
    double x = 0.0;
    if (uniform01(rng) < prop.exp_mass) {
      x = kTrunc + standard_exponential(rng) / prop.fz;
    } else {
      x = truncated_inv_gauss(prop.z, rng);
    }
    double s = series_coef(0, x);
    const double y = uniform01(rng) * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

}  // namespace

double sample_pg1(double c, Rng& rng) { return draw_pg1(make_pg1_proposal(c), rng); }

double sample_pg(int b, double c, Rng& rng) {
  if (b < 1) throw ValidationError("PG shape b must be a positive integer");
  const Pg1Proposal prop = make_pg1_proposal(c);
  double sum = 0.0;
  for (int i = 0; i < b; ++i) sum += draw_pg1(prop, rng);
  return sum;
}

double pg_mean(double b, double c) {
  c = std::abs(c);
  if (c < 1e-6) return b * (0.25 - c * c / 48.0);
  return b / (2.0 * c) * std::tanh(0.5 * c);
}

double pg_variance(double b, double c) {
  c = std::abs(c);
  if (c < 1e-3) return b * (1.0 / 24.0 - c * c / 240.0);
  const double ch = std::cosh(0.5 * c);
  return b * (std::sinh(c) - c) / (4.0 * c * c * c * ch * ch);
}

Eigen::VectorXd pg_kappa(const Dataset& data) {
  if (!data.trials) throw ValidationError("Polya-Gamma sampler needs a trials column");
  return data.y - 0.5 * (*data.trials);
}

DrawMatrix pg_da_sampler(const Dataset& data, const GaussianPrior& prior, double power,
                         const ChainConfig& cfg) {
  cfg.validate();
  if (!data.trials) throw ValidationError("Polya-Gamma sampler needs a trials column");
  data.validate(Family::logistic_binomial);
  if (!(power >= 1.0)) throw ValidationError("likelihood power must be >= 1");
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (prior.mean.size() != p || prior.cov.dim() != p) {
    throw ValidationError("Gaussian prior dimension does not match the design");
  }
  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.cov.matrix());
  if (prior_llt.info() != Eigen::Success) {
    throw NotPsdError("Gaussian prior covariance is not positive definite", 0.0);
  }
  const Eigen::MatrixXd prior_prec = prior_llt.solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::VectorXd rhs =
      power * (data.X.transpose() * pg_kappa(data)) + prior_prec * prior.mean;

  std::vector<int> trials(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    trials[static_cast<std::size_t>(i)] = static_cast<int>((*data.trials)(i));
  }

  Rng rng = make_rng(cfg.seed);
  DrawMatrix raw;
  raw.param_names = indexed_names("beta", p);
  raw.diagnostics.seed_used = cfg.seed;
  raw.draws.resize(cfg.total_iters, p);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd root_omega(n);
  Eigen::VectorXd z(p);
  for (int it = 0; it < cfg.total_iters; ++it) {
    const Eigen::VectorXd eta = data.X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      root_omega(i) = std::sqrt(sample_pg(trials[static_cast<std::size_t>(i)],
                                          std::abs(eta(i)), rng));
    }
    const Eigen::MatrixXd weighted = data.X.array().colwise() * root_omega.array();
    Eigen::MatrixXd precision = prior_prec;
    precision.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose(), power);
    precision.triangularView<Eigen::StrictlyUpper>() =
        precision.triangularView<Eigen::StrictlyLower>().transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Polya-Gamma conditional precision is not positive definite");
    }
    const Eigen::VectorXd mean = llt.solve(rhs);
    for (Eigen::Index j = 0; j < p; ++j) z(j) = standard_normal(rng);
    beta = mean + llt.matrixU().solve(z);
    raw.draws.row(it) = beta.transpose();
  }
  return postprocess_chain(raw, cfg);
}

// ---------------------------------------------------------------------------
// Adaptive random-walk Metropolis

namespace {

Eigen::MatrixXd numeric_hessian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                                const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd h(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(x(j)));
    Eigen::VectorXd up = x, down = x;
    up(j) += step;
    down(j) -= step;
    h.col(j) = (grad(up) - grad(down)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

// Inverse of -H when -H is positive definite.
std::optional<Eigen::MatrixXd> inverse_neg_hessian(const Eigen::MatrixXd& h) {
  const SymEigen eig = sym_eigen(SymMatrix(-h));
  if (!(eig.values(0) > 1e-12 * std::max(eig.values(eig.values.size() - 1), 1e-300))) {
    return std::nullopt;
  }
  return eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();
}

// Damped Newton ascent; returns the best point found.
Eigen::VectorXd find_mode(const std::function<double(const Eigen::VectorXd&)>& logpost,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                          Eigen::VectorXd x) {
  double f = logpost(x);
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd g = grad(x);
    if (!g.allFinite()) break;
    Eigen::VectorXd dir = g;
    if (const auto inv = inverse_neg_hessian(numeric_hessian(grad, x))) dir = *inv * g;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      const Eigen::VectorXd cand = x + t * dir;
      const double fc = logpost(cand);
      if (std::isfinite(fc) && fc > f) {
        const double gain = fc - f;
        x = cand;
        f = fc;
        moved = true;
        if (gain < 1e-10 * (1.0 + std::abs(f))) return x;
        break;
      }
    }
    if (!moved) break;
  }
  return x;
}

struct RunningMoments {
  Eigen::Index count = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd m2;

  explicit RunningMoments(Eigen::Index d)
      : mean(Eigen::VectorXd::Zero(d)), m2(Eigen::MatrixXd::Zero(d, d)) {}
  void add(const Eigen::VectorXd& x) {
    ++count;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean).transpose();
  }
  Eigen::MatrixXd covariance() const {
    return 0.5 * (m2 + m2.transpose()) / static_cast<double>(std::max<Eigen::Index>(count - 1, 1));
  }
};

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // fall back to the diagonal
  Eigen::VectorXd diag = cov.diagonal().cwiseMax(1e-12);
  return diag.cwiseSqrt().asDiagonal();
}

}  // namespace

DrawMatrix adaptive_mh_sampler(const std::function<double(const Eigen::VectorXd&)>& logpost,
                               const Eigen::VectorXd& init, const ChainConfig& cfg,
                               const MhOptions& options) {
  cfg.validate();
  const Eigen::Index d = init.size();
  if (d < 1) throw ValidationError("MH sampler needs at least one parameter");
  double lp = logpost(init);
  if (!std::isfinite(lp)) {
    throw ValidationError("log posterior is not finite at the initial point");
  }

  Eigen::MatrixXd shape = Eigen::MatrixXd::Identity(d, d) * 1e-2;
  if (options.initial_proposal) {
    shape = *options.initial_proposal;
  } else if (options.gradient) {
    if (const auto inv = inverse_neg_hessian(numeric_hessian(options.gradient, init))) {
      shape = *inv;
    }
  }
  if (shape.rows() != d || shape.cols() != d) {
    throw ValidationError("initial proposal covariance has wrong dimension");
  }

  Rng rng = make_rng(cfg.seed);
  double log_scale = std::log(2.38 * 2.38 / static_cast<double>(d));
  Eigen::MatrixXd chol = cholesky_factor(shape);

  DrawMatrix raw;
  raw.param_names = options.param_names.empty() ? indexed_names("theta", d)
                                                : options.param_names;
  if (static_cast<Eigen::Index>(raw.param_names.size()) != d) {
    throw ValidationError("MH parameter names do not match the dimension");
  }
  raw.diagnostics.seed_used = cfg.seed;
  raw.draws.resize(cfg.total_iters, d);

  // Shape is re-estimated at the end of doubling windows inside burn-in.
  int window_end = std::min(100, cfg.burn_in);
  int window_len = 100;
  RunningMoments window(d);

  Eigen::VectorXd x = init;
  Eigen::VectorXd z(d);
  long accepted_after = 0;
  for (int it = 0; it < cfg.total_iters; ++it) {
    const bool adapting = it < cfg.burn_in;
    for (Eigen::Index j = 0; j < d; ++j) z(j) = standard_normal(rng);
    const Eigen::VectorXd cand = x + std::exp(0.5 * log_scale) * (chol * z);
    const double lp_cand = logpost(cand);
    const double log_alpha = std::isfinite(lp_cand) ? lp_cand - lp : -INFINITY;
    const double alpha = log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha);
    if (uniform01(rng) < alpha) {
      x = cand;
      lp = lp_cand;
      if (!adapting) ++accepted_after;
    }
    raw.draws.row(it) = x.transpose();

    if (adapting) {
      const double gain = std::pow(static_cast<double>(it) + 1.0, -0.6);
      log_scale += gain * (alpha - options.target_acceptance);
      window.add(x);
      if (it + 1 == window_end && it + 1 < cfg.burn_in) {
        if (window.count > 2 * d) {
          const Eigen::MatrixXd cov = window.covariance();
          const double jitter = 1e-10 * std::max(cov.trace() / static_cast<double>(d), 1e-300);
          chol = cholesky_factor(cov + jitter * Eigen::MatrixXd::Identity(d, d));
          // the new shape already carries the chain's spread
          log_scale = std::log(2.38 * 2.38 / static_cast<double>(d));
        }
        window = RunningMoments(d);
        window_len *= 2;
        window_end = (cfg.burn_in - window_end < 2 * window_len) ? cfg.burn_in
                                                                 : window_end + window_len;
      }
    }
  }
  const int post = cfg.total_iters - cfg.burn_in;
  raw.diagnostics.acceptance_rate =
      static_cast<double>(accepted_after) / static_cast<double>(post);
  return postprocess_chain(raw, cfg);
}

DrawMatrix mh_posterior(const Dataset& data, const GlmSpec& spec, const ChainConfig& cfg) {
  const PosteriorEvaluator eval(spec, data);
  const auto logpost = [&eval](const Eigen::VectorXd& v) { return eval(v); };
  const auto grad = [&eval](const Eigen::VectorXd& v) { return eval.gradient(v); };
  Eigen::VectorXd init = Eigen::VectorXd::Zero(eval.dim());
  init = find_mode(logpost, grad, init);
  MhOptions opts;
  opts.gradient = grad;
  opts.param_names = parameter_names(spec.family, data);
  return adaptive_mh_sampler(logpost, init, cfg, opts);
}

DrawMatrix sample_posterior(const Dataset& data, const GlmSpec& spec,
                            const ChainConfig& cfg) {
  spec.validate();
  switch (spec.family) {
    case Family::linear:
      if (std::holds_alternative<ImproperLinearPrior>(spec.prior.kind)) {
        return conjugate_linear_sampler(data, spec.power, cfg);
      }
      return mh_posterior(data, spec, cfg);
    case Family::logistic_binomial:
      return pg_da_sampler(data, std::get<GaussianPrior>(spec.prior.kind), spec.power, cfg);
    case Family::negative_binomial:
    case Family::multinomial_logistic:
      return mh_posterior(data, spec, cfg);
  }
  throw ValidationError("unsupported family");
}

}  // namespace lswasp
