#include "lswasp/rng.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace lswasp {

double standard_normal(Rng& rng) {
  return boost::random::normal_distribution<double>(0.0, 1.0)(rng);
}

double uniform01(Rng& rng) { return boost::random::uniform_01<double>()(rng); }

double standard_exponential(Rng& rng) {
  return boost::random::exponential_distribution<double>(1.0)(rng);
}

double gamma_variate(Rng& rng, double shape, double scale) {
  return boost::random::gamma_distribution<double>(shape, scale)(rng);
}

}  // namespace lswasp
