#include <doctest.h>

#include <cmath>

#include "lswasp/barycenter.hpp"
#include "lswasp/errors.hpp"
#include "lswasp/metrics.hpp"
#include "lswasp/samplers.hpp"
#include "test_helpers.hpp"

using namespace lswasp;
using lswasp::testing::max_abs_diff;

namespace {
DrawMatrix counting_chain(int rows, int cols) {
  DrawMatrix d;
  d.draws.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) d.draws(r, c) = r + 1 + 0.5 * c;  // row r holds r+1
  d.param_names = indexed_names("theta", cols);
  return d;
}

GaussianPrior flat_prior(Eigen::Index p, double var = 100.0) {
  return {Eigen::VectorXd::Zero(p), var * SymMatrix::identity(p)};
}
}  // namespace

TEST_CASE("chain post-processing") {
  ChainConfig cfg;
  CHECK(cfg.retained() == 1000);
  const DrawMatrix raw = counting_chain(10000, 2);
  const DrawMatrix kept = postprocess_chain(raw, cfg);
  CHECK(kept.rows() == 1000);
  for (int t = 1; t <= 1000; ++t) CHECK(kept.draws(t - 1, 0) == 5000 + 5 * t);

  ChainConfig id{20, 0, 1, 1};
  const DrawMatrix small = counting_chain(20, 1);
  CHECK(postprocess_chain(small, id).draws == small.draws);

  CHECK_THROWS_AS((ChainConfig{10, 10, 1, 1}).validate(), ValidationError);
  CHECK_THROWS_AS((ChainConfig{10, 9, 1, 1}).validate(), ValidationError);  // T = 1
  CHECK_THROWS_AS((ChainConfig{10, 0, 0, 1}).validate(), ValidationError);
}

TEST_CASE("conjugate linear posterior") {
  SUBCASE("orthonormal design, y equal to the first column") {
    Rng rng = make_rng(3);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(lswasp::testing::gaussian_matrix(40, 4, rng));
    Dataset d;
    d.X = Eigen::MatrixXd(qr.householderQ()).leftCols(4);
    d.y = d.X.col(0);
    const LinearPosterior post = conjugate_linear_posterior(d, 1.0);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
    e1(0) = 1.0;
    CHECK(max_abs_diff(post.location, e1) < 1e-12);
  }
  SUBCASE("degrees of freedom use the powered sample size") {
    const SimulatedData sim = simulate_linear(200, 5, 1.0, 2);
    CHECK(conjugate_linear_posterior(sim.data, 10.0).df == 1995.0);
  }
  SUBCASE("powering by n/m keeps the full-data spread") {
    // Repeating the rows r times leaves the posterior of the repeated data
    // equal to the power-r posterior of the original.
    const SimulatedData sim = simulate_linear(60, 2, 1.0, 5);
    Dataset rep;
    rep.X.resize(180, 2);
    rep.y.resize(180);
    for (int r = 0; r < 3; ++r) {
      rep.X.middleRows(60 * r, 60) = sim.data.X;
      rep.y.segment(60 * r, 60) = sim.data.y;
    }
    const LinearPosterior a = conjugate_linear_posterior(sim.data, 3.0);
    const LinearPosterior b = conjugate_linear_posterior(rep, 1.0);
    CHECK(a.df == b.df);
    CHECK(max_abs_diff(a.scale.matrix(), b.scale.matrix()) < 1e-12);
  }
  SUBCASE("sampled covariance matches the t covariance") {
    const SimulatedData sim = simulate_linear(300, 3, 1.0, 4);
    const ChainConfig cfg{100000, 0, 1, 9};
    const DrawMatrix draws = conjugate_linear_sampler(sim.data, 1.0, cfg);
    CHECK(draws.rows() == 100000);
    const SymMatrix want = conjugate_linear_posterior(sim.data, 1.0).covariance();
    const MomentSummary got = moment_summary(draws);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(got.cov(i, i) / want(i, i) - 1.0) < 0.03);
    }
  }
  SUBCASE("errors") {
    Dataset d;
    d.X = Eigen::MatrixXd::Ones(10, 2);
    d.y = Eigen::VectorXd::LinSpaced(10, 0, 1);
    CHECK_THROWS_AS(conjugate_linear_posterior(d, 1.0), SingularMatrixError);
    const SimulatedData tiny = simulate_linear(5, 3, 1.0, 1);
    CHECK_THROWS_AS(conjugate_linear_posterior(tiny.data, 1.0), ValidationError);
  }
}

TEST_CASE("multivariate t") {
  Rng rng = make_rng(10);
  const Eigen::Vector2d loc(1.0, -2.0);
  Eigen::Matrix2d sc;
  sc << 2.0, 0.5, 0.5, 1.0;
  SUBCASE("large df approaches the Gaussian") {
    const MultivariateT t(1e6, loc, SymMatrix(sc));
    Eigen::MatrixXd m(50000, 2);
    for (int i = 0; i < 50000; ++i) m.row(i) = t(rng).transpose();
    const MomentSummary s = moment_summary(m);
    CHECK(max_abs_diff(s.mean, loc) < 0.03);
    CHECK(max_abs_diff(s.cov.matrix(), sc) < 0.05);
  }
  SUBCASE("zero scale returns the location") {
    CHECK(mvt_sample(4.0, loc, SymMatrix::zero(2), rng) == Eigen::VectorXd(loc));
  }
  SUBCASE("mean for df 5") {
    const MultivariateT t(5.0, loc, SymMatrix(sc));
    Eigen::MatrixXd m(100000, 2);
    for (int i = 0; i < 100000; ++i) m.row(i) = t(rng).transpose();
    const Eigen::VectorXd mean = m.colwise().mean();
    const Eigen::VectorXd se = (sc.diagonal() * 5.0 / 3.0 / 100000.0).cwiseSqrt();
    for (int j = 0; j < 2; ++j) CHECK(std::abs(mean(j) - loc(j)) < 3.0 * se(j));
  }
}

TEST_CASE("Polya-Gamma moments") {
  CHECK(pg_mean(1.0, 1.0) == doctest::Approx(0.5 * std::tanh(0.5)));
  CHECK(pg_mean(1.0, 0.0) == 0.25);
  CHECK(pg_variance(1.0, 0.0) == doctest::Approx(1.0 / 24.0));
  CHECK(pg_variance(2.0, 1e-4) == doctest::Approx(pg_variance(2.0, 0.0)).epsilon(1e-6));

  Rng rng = make_rng(42);
  const int n = 100000;
  auto mean_of = [&](int b, double c) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sample_pg(b, c, rng);
    return s / n;
  };
  const double m11 = mean_of(1, 1.0);
  CHECK(std::abs(m11 - 0.5 * std::tanh(0.5)) < 3.0 * std::sqrt(pg_variance(1, 1.0) / n));
  const double m10 = mean_of(1, 0.0);
  CHECK(std::abs(m10 - 0.25) < 3.0 * std::sqrt(pg_variance(1, 0.0) / n));
  const double m42 = mean_of(4, 2.0);
  const double m12 = mean_of(1, 2.0);
  const double se = std::sqrt(pg_variance(4, 2.0) / n + 16.0 * pg_variance(1, 2.0) / n);
  CHECK(std::abs(m42 - 4.0 * m12) < 4.0 * se);
  CHECK_THROWS_AS(sample_pg(0, 1.0, rng), ValidationError);
}

TEST_CASE("kappa") {
  Dataset d;
  d.X = Eigen::MatrixXd::Ones(1, 1);
  d.y = Eigen::VectorXd::Constant(1, 3.0);
  d.trials = Eigen::VectorXd::Constant(1, 15.0);
  CHECK(pg_kappa(d)(0) == -4.5);
}

TEST_CASE("Polya-Gamma Gibbs sampler") {
  SUBCASE("a tight prior dominates") {
    const SimulatedData sim = simulate_logistic(200, 2, 15, 3);
    GaussianPrior prior{Eigen::Vector2d(0.3, -0.7), 1e-8 * SymMatrix::identity(2)};
    const DrawMatrix d = pg_da_sampler(sim.data, prior, 1.0, {400, 100, 1, 5});
    CHECK(max_abs_diff(moment_summary(d).mean, prior.mean) < 1e-3);
  }
  SUBCASE("agrees with adaptive Metropolis") {
    const SimulatedData sim = simulate_logistic(500, 2, 15, 4);
    GlmSpec spec;
    spec.family = Family::logistic_binomial;
    spec.prior.kind = flat_prior(2);
    const ChainConfig cfg{6000, 1000, 1, 8};
    const DrawMatrix pg = pg_da_sampler(sim.data, flat_prior(2), 1.0, cfg);
    const DrawMatrix mh = mh_posterior(sim.data, spec, cfg);
    const MomentSummary a = moment_summary(pg);
    const MomentSummary b = moment_summary(mh);
    const Eigen::VectorXd ess_a = effective_sample_size(pg.draws);
    const Eigen::VectorXd ess_b = effective_sample_size(mh.draws);
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt(a.cov(j, j) / ess_a(j) + b.cov(j, j) / ess_b(j));
      CHECK(std::abs(a.mean(j) - b.mean(j)) < 4.0 * se);
    }
  }
  SUBCASE("needs trial counts") {
    SimulatedData sim = simulate_logistic(50, 2, 15, 3);
    sim.data.trials.reset();
    CHECK_THROWS_AS(pg_da_sampler(sim.data, flat_prior(2), 1.0, {20, 0, 1, 1}), ValidationError);
  }
}

TEST_CASE("adaptive Metropolis") {
  SUBCASE("standard Gaussian target") {
    const auto logpost = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
    const ChainConfig cfg{40000, 10000, 3, 6};
    const DrawMatrix d = adaptive_mh_sampler(logpost, Eigen::VectorXd::Constant(3, 2.0), cfg);
    const MomentSummary s = moment_summary(d);
    const Eigen::VectorXd ess = effective_sample_size(d.draws);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(s.mean(j)) < 4.0 * std::sqrt(1.0 / ess(j)));
      CHECK(std::abs(s.cov(j, j) - 1.0) < 0.1);
    }
    CHECK(*d.diagnostics.acceptance_rate >= 0.1);
    CHECK(*d.diagnostics.acceptance_rate <= 0.5);
  }
  SUBCASE("bimodal target visits both modes") {
    // modes at +-1 with unit spread: separation of 2 standard deviations
    const auto logpost = [](const Eigen::VectorXd& x) {
      const double a = -0.5 * (x(0) - 1.0) * (x(0) - 1.0);
      const double b = -0.5 * (x(0) + 1.0) * (x(0) + 1.0);
      return std::max(a, b) + std::log1p(std::exp(std::min(a, b) - std::max(a, b)));
    };
    const DrawMatrix d =
        adaptive_mh_sampler(logpost, Eigen::VectorXd::Constant(1, 1.0), {20000, 2000, 1, 3});
    int changes = 0;
    for (Eigen::Index t = 1; t < d.rows(); ++t) {
      if ((d.draws(t, 0) > 0.0) != (d.draws(t - 1, 0) > 0.0)) ++changes;
    }
    CHECK(changes > 10);
    CHECK(*d.diagnostics.acceptance_rate >= 0.1);
    CHECK(*d.diagnostics.acceptance_rate <= 0.5);
  }
  SUBCASE("non-finite start is rejected") {
    const auto logpost = [](const Eigen::VectorXd&) { return -INFINITY; };
    CHECK_THROWS_AS(adaptive_mh_sampler(logpost, Eigen::VectorXd::Zero(1), {20, 0, 1, 1}),
                    ValidationError);
  }
}

TEST_CASE("dispatch by family") {
  const SimulatedData lin = simulate_linear(100, 2, 1.0, 1);
  GlmSpec spec;
  spec.family = Family::linear;
  spec.prior = PriorSpec::default_for(Family::linear, 2);
  const ChainConfig cfg{200, 100, 1, 3};
  const DrawMatrix a = sample_posterior(lin.data, spec, cfg);
  CHECK(a.draws == conjugate_linear_sampler(lin.data, 1.0, cfg).draws);

  const SimulatedData lg = simulate_logistic(100, 2, 15, 1);
  spec.family = Family::logistic_binomial;
  spec.prior = PriorSpec::default_for(Family::logistic_binomial, 2);
  CHECK(sample_posterior(lg.data, spec, cfg).draws ==
        pg_da_sampler(lg.data, std::get<GaussianPrior>(spec.prior.kind), 1.0, cfg).draws);

  const SimulatedData nb = simulate_negbin(300, 2, 2);
  spec.family = Family::negative_binomial;
  spec.prior = PriorSpec::default_for(Family::negative_binomial, 2);
  const DrawMatrix n = sample_posterior(nb.data, spec, {3000, 1000, 2, 4});
  CHECK(n.dim() == 3);
  CHECK(n.param_names.back() == "log_phi");
  CHECK(n.diagnostics.acceptance_rate.has_value());
  // rough recovery of (-1, 1, log 2)
  const MomentSummary s = moment_summary(n);
  CHECK(std::abs(s.mean(0) + 1.0) < 0.3);
  CHECK(std::abs(s.mean(1) - 1.0) < 0.3);
  CHECK(std::abs(s.mean(2) - std::log(2.0)) < 0.6);
}
