#include <doctest.h>

#include "property_checks.hpp"

using namespace lswasp::testing;

#define CHECK_PROPERTY(expr)              \
  do {                                    \
    const CheckResult r_ = (expr);        \
    INFO(r_.detail);                      \
    CHECK(r_.ok);                         \
  } while (0)

TEST_CASE("Bures metric axioms and bounds") { CHECK_PROPERTY(bures_axioms(200, 101)); }
TEST_CASE("W2 is invariant under rigid motions") { CHECK_PROPERTY(w2_rotation_invariance(100, 102)); }
TEST_CASE("k = 1 leaves draws unchanged") { CHECK_PROPERTY(k1_identity_both_combiners(103)); }
TEST_CASE("subset order does not matter") { CHECK_PROPERTY(combiner_permutation_invariance(104)); }
TEST_CASE("DPMC mean is the average of subset means") { CHECK_PROPERTY(dpmc_exact_mean(105)); }
TEST_CASE("WASP draws carry the barycenter moments") { CHECK_PROPERTY(wasp_exact_moments(106)); }
TEST_CASE("partitions are disjoint, exhaustive and balanced") { CHECK_PROPERTY(partition_sweep(50, 107)); }
TEST_CASE("retained rows follow burn-in and thinning") { CHECK_PROPERTY(postprocess_arithmetic(100, 108)); }
TEST_CASE("CSV round trips are exact") { CHECK_PROPERTY(csv_round_trips(10, 109)); }
TEST_CASE("pipeline output is reproducible") { CHECK_PROPERTY(pipeline_determinism(110)); }
