#pragma once

// Random equal-size partitions and the parallel subset driver.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lswasp/draw_matrix.hpp"
#include "lswasp/glm_models.hpp"
#include "lswasp/samplers.hpp"

namespace lswasp {

struct Partition {
  int k = 1;
  std::vector<int> assignments;  // subset label in 1..k for every row
  std::vector<Eigen::Index> sizes;

  /// Rows of subset j (1-indexed), ascending.
  std::vector<Eigen::Index> members(int j) const;
  Eigen::Index n() const { return static_cast<Eigen::Index>(assignments.size()); }
};

/// Uniform random permutation cut into k contiguous blocks; the first
/// n mod k blocks get one extra row.
Partition partition(Eigen::Index n, int k, std::uint64_t seed);

struct RunTiming {
  std::vector<double> subset_wall_clocks;
  double combine_wall_clock = 0.0;
  std::optional<double> full_wall_clock;

  /// max_j subset time + combine time (all subsets in parallel)
  double dnc_parallel() const;
  /// sum_j subset time + combine time (one core)
  double dnc_sum() const;
};

struct SubsetRun {
  std::vector<DrawMatrix> draws;  // index j-1 holds subset j
  RunTiming timing;
  std::vector<int> failed;  // only non-empty with allow_partial
};

/// Samples every subset posterior with power n / m_j and seed cfg.seed + j
/// on a pool of `workers` threads. Any failure raises an error naming the
/// failed subsets unless allow_partial is set, in which case the failures
/// are listed and their slots left empty.
SubsetRun run_subsets_parallel(const Dataset& data, const Partition& part,
                               const GlmSpec& spec, const ChainConfig& cfg, int workers,
                               bool allow_partial = false);

struct FullRun {
  DrawMatrix draws;
  double wall_clock = 0.0;
};

/// Full-data posterior (power forced to 1).
FullRun run_full(const Dataset& data, const GlmSpec& spec, const ChainConfig& cfg);

/// Subset power n / m_j.
double subset_power(Eigen::Index n, Eigen::Index m);

}  // namespace lswasp
