#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lswasp {

struct ChainDiagnostics {
  std::optional<double> acceptance_rate;
  std::uint64_t seed_used = 0;
};

/// T x d posterior draws, one row per retained draw.
struct DrawMatrix {
  Eigen::MatrixXd draws;
  std::vector<std::string> param_names;
  ChainDiagnostics diagnostics;

  Eigen::Index rows() const { return draws.rows(); }
  Eigen::Index dim() const { return draws.cols(); }

  /// Checks T >= 2, finite entries and one name per column.
  void validate() const;
};

/// beta_1 ... beta_p
std::vector<std::string> indexed_names(const std::string& stem, Eigen::Index count);

}  // namespace lswasp
