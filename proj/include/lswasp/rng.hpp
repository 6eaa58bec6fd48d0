#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace lswasp {

// 64-bit Mersenne Twister (MT19937-64). Its output sequence is fixed by the
// C++ standard, and all variates are produced through Boost.Random
// distributions, whose algorithms do not vary between standard libraries.
using Rng = boost::random::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

double standard_normal(Rng& rng);
double uniform01(Rng& rng);
double standard_exponential(Rng& rng);
/// Gamma(shape, scale).
double gamma_variate(Rng& rng, double shape, double scale);

}  // namespace lswasp
