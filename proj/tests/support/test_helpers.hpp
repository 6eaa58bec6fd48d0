#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "lswasp/psd_linalg.hpp"
#include "lswasp/rng.hpp"

namespace lswasp::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = standard_normal(rng);
  return m;
}

// Wishart-like SPD matrix with a diagonal ridge so it stays well conditioned.
inline SymMatrix random_spd(Eigen::Index d, Rng& rng, double ridge = 0.1) {
  const Eigen::MatrixXd g = gaussian_matrix(d, d + 2, rng);
  return SymMatrix(g * g.transpose() / static_cast<double>(d + 2) +
                   ridge * Eigen::MatrixXd::Identity(d, d));
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, Rng& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(d, d, rng));
  return qr.householderQ();
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace lswasp::testing
