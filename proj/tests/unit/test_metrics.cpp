#include <doctest.h>

#include <cmath>

#include "lswasp/errors.hpp"
#include "lswasp/metrics.hpp"
#include "test_helpers.hpp"

using namespace lswasp;

namespace {
MomentSummary scalar(double mu, double var) {
  MomentSummary s;
  s.mean = Eigen::VectorXd::Constant(1, mu);
  s.cov = SymMatrix::diagonal(Eigen::VectorXd::Constant(1, var));
  return s;
}
}  // namespace

TEST_CASE("approximation error") {
  CHECK(approximation_error(scalar(0, 1), scalar(0, 1)) == doctest::Approx(0.0));
  CHECK(approximation_error(scalar(0, 1), scalar(0.3, 1.21)) ==
        doctest::Approx(std::sqrt(0.10)).epsilon(1e-12));
  Rng rng = make_rng(1);
  MomentSummary a;
  a.mean = Eigen::Vector3d(1, 2, 3);
  a.cov = lswasp::testing::random_spd(3, rng);
  MomentSummary b = a;
  b.mean += Eigen::Vector3d(0.3, 0.0, -0.4);
  CHECK(approximation_error(a, b) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(approximation_error(a, b) ==
        std::sqrt(gaussian_w2_sq(a.mean, a.cov, b.mean, b.cov)));
  CHECK_THROWS_AS(approximation_error(a, scalar(0, 1)), ValidationError);
}

TEST_CASE("computational gain") {
  CHECK(computational_gain(10, 10) == 1.0);
  CHECK(computational_gain(100, 4) == 25.0);
  CHECK(computational_gain(0.9036, 1.0) < 1.0);
  CHECK_THROWS_AS(computational_gain(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(computational_gain(1.0, -2.0), ValidationError);
}

TEST_CASE("scaling diagnostic") {
  CHECK(scaling_diagnostic({{1e4, 0.0535}, {1e5, 0.0457}}).monotone_decreasing);
  CHECK_FALSE(scaling_diagnostic({{100, 0.2}, {200, 0.2}, {400, 0.2}}).monotone_decreasing);
  const ScalingReport r = scaling_diagnostic({{400, 0.5}, {100, 1.0}, {1600, 0.25}});
  CHECK(r.monotone_decreasing);
  for (const auto& [n, v] : r.sqrt_n_scaled) CHECK(v == doctest::Approx(10.0));
  CHECK(r.sqrt_n_scaled.front().first == 100);
  CHECK_THROWS_AS(scaling_diagnostic({{10, 1.0}}), ValidationError);
  CHECK_THROWS_AS(scaling_diagnostic({{10, 1.0}, {10, 0.5}}), ValidationError);
}

TEST_CASE("per-block errors use marginal moments") {
  MomentSummary a, b;
  a.mean = Eigen::Vector3d(0, 0, 0);
  b.mean = Eigen::Vector3d(3, 0, 4);
  a.cov = b.cov = SymMatrix::identity(3);
  const auto e = per_block_errors(a, b, {{"first", {0}}, {"rest", {1, 2}}});
  CHECK(e.at("first") == doctest::Approx(3.0));
  CHECK(e.at("rest") == doctest::Approx(4.0));
  CHECK_THROWS_AS(per_block_errors(a, b, {{"bad", {5}}}), ValidationError);
}

TEST_CASE("effective sample size") {
  Rng rng = make_rng(2);
  Eigen::VectorXd iid(4000), ar(4000);
  double prev = 0.0;
  for (int i = 0; i < 4000; ++i) {
    iid(i) = standard_normal(rng);
    prev = 0.9 * prev + standard_normal(rng);
    ar(i) = prev;
  }
  CHECK(effective_sample_size(iid) > 3000);
  // AR(1) with rho 0.9: n (1 - rho) / (1 + rho) ~ 210
  const double ess = effective_sample_size(ar);
  CHECK(ess > 100);
  CHECK(ess < 400);
}
