#include <doctest.h>

#include "lswasp/errors.hpp"
#include "lswasp/psd_linalg.hpp"
#include "test_helpers.hpp"

using namespace lswasp;
using lswasp::testing::max_abs_diff;
using lswasp::testing::random_spd;

namespace {
SymMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (auto r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SymMatrix(m);
}
SymMatrix diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(v.size());
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return SymMatrix::diagonal(d);
}
}  // namespace

TEST_CASE("construction symmetrizes exactly") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const SymMatrix s(m);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == 2.5);
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(2, 3)), ValidationError);
}

TEST_CASE("eigendecomposition") {
  SUBCASE("identity") {
    const SymEigen e = sym_eigen(SymMatrix::identity(3));
    CHECK(max_abs_diff(e.values, Eigen::Vector3d::Ones()) < 1e-14);
  }
  SUBCASE("diagonal") {
    const SymEigen e = sym_eigen(diag({1.0, 4.0}));
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(4.0));
    CHECK(max_abs_diff(e.vectors.cwiseAbs(), Eigen::Matrix2d::Identity()) < 1e-14);
  }
  SUBCASE("[[2,1],[1,2]] has eigenvalues 1 and 3") {
    const SymEigen e = sym_eigen(sym({{2, 1}, {1, 2}}));
    CHECK(e.values(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.values(1) == doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("square roots") {
  CHECK(max_abs_diff(psd_sqrt(SymMatrix::identity(2)).matrix(), Eigen::Matrix2d::Identity()) <
        1e-14);
  CHECK(max_abs_diff(psd_sqrt(diag({4, 9})).matrix(), diag({2, 3}).matrix()) < 1e-14);
  const SymMatrix a = sym({{5, 4}, {4, 5}});
  const SymMatrix r = psd_sqrt(a);
  CHECK(max_abs_diff(r.matrix() * r.matrix(), a.matrix()) < 1e-8);

  CHECK(max_abs_diff(psd_inv_sqrt(SymMatrix::identity(3)).matrix(), Eigen::Matrix3d::Identity()) <
        1e-14);
  CHECK(max_abs_diff(psd_inv_sqrt(diag({4, 25})).matrix(), diag({0.5, 0.2}).matrix()) < 1e-14);
  Rng rng = make_rng(7);
  const SymMatrix b = random_spd(5, rng);
  const SymMatrix ib = psd_inv_sqrt(b);
  CHECK(max_abs_diff(ib.matrix() * b.matrix() * ib.matrix(), Eigen::MatrixXd::Identity(5, 5)) <
        1e-8);
}

TEST_CASE("clamping and rejection of non-PSD input") {
  SpdCheckReport rep;
  const SymMatrix tiny_neg = diag({1.0, -1e-15});
  const SymMatrix r = psd_sqrt(tiny_neg, std::nullopt, rep);
  CHECK(rep.clamped);
  CHECK(r(1, 1) == 0.0);
  CHECK_THROWS_AS(psd_sqrt(diag({1.0, -0.5})), NotPsdError);
  CHECK_THROWS_AS(psd_inv_sqrt(diag({1.0, 0.0})), SingularMatrixError);
  try {
    psd_sqrt(diag({1.0, -0.5}));
  } catch (const NotPsdError& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(-0.5));
  }
}

TEST_CASE("Bures distance closed forms") {
  CHECK(bures_dist(SymMatrix::identity(2), SymMatrix::identity(2)) == doctest::Approx(0.0));
  CHECK(bures_dist(diag({1}), diag({4})) == doctest::Approx(1.0).epsilon(1e-14));
  // commuting case: |sqrt(A) - sqrt(B)|_F
  CHECK(bures_dist(diag({1, 4}), diag({9, 16})) ==
        doctest::Approx(std::sqrt(4.0 + 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bures_dist(diag({1, 2}), diag({1, 2, 3})), ValidationError);
}

TEST_CASE("gaussian W2 closed forms") {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  CHECK(gaussian_w2_sq(z, SymMatrix::identity(2), z, SymMatrix::identity(2)) ==
        doctest::Approx(0.0));
  Eigen::VectorXd m0(1), m3(1);
  m0 << 0.0;
  m3 << 3.0;
  CHECK(gaussian_w2_sq(m0, diag({1}), m3, diag({4})) == doctest::Approx(10.0).epsilon(1e-14));
  Rng rng = make_rng(3);
  const SymMatrix s = random_spd(4, rng);
  Eigen::VectorXd mu = Eigen::VectorXd::LinSpaced(4, -1, 2);
  Eigen::VectorXd v(4);
  v << 0.5, -1.0, 2.0, 0.25;
  CHECK(gaussian_w2_sq(mu, s, mu + v, s) == doctest::Approx(v.squaredNorm()).epsilon(1e-9));
}
