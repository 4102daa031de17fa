#include "rfme/random.hpp"

#include <cmath>
#include <limits>

namespace rfme {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling on the top of the range avoids modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  // Split large means so exp(-mean) does not underflow.
  if (mean > 500.0) {
    const double half = mean / 2.0;
    return poisson(half) + poisson(mean - half);
  }
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && cdf <= u) break;
  }
  return k;
}

}  // namespace rfme
