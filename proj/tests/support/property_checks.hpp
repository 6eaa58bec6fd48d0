#pragma once

// Randomized property suites shared by the unit tests and the acceptance
// runner. Each returns ok plus a one-line detail for the failure report.

#include <cstdint>
#include <string>

namespace lswasp::testing {

struct CheckResult {
  bool ok = true;
  std::string detail;
};

CheckResult bures_axioms(int triples, std::uint64_t seed);
CheckResult w2_rotation_invariance(int trials, std::uint64_t seed);
CheckResult k1_identity_both_combiners(std::uint64_t seed);
CheckResult combiner_permutation_invariance(std::uint64_t seed);
CheckResult dpmc_exact_mean(std::uint64_t seed);
CheckResult wasp_exact_moments(std::uint64_t seed);
CheckResult partition_sweep(int cases, std::uint64_t seed);
CheckResult postprocess_arithmetic(int cases, std::uint64_t seed);
CheckResult csv_round_trips(int cases, std::uint64_t seed);
CheckResult pipeline_determinism(std::uint64_t seed);

}  // namespace lswasp::testing
