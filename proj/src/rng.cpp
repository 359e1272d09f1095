#include "ptproc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ptproc {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter) {
  // splitmix64 step applied to the counter offset by the master seed.
  std::uint64_t z = master + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential rate must be > 0");
  return -std::log(uniform()) / rate;
}

double Rng::normal() {
  // Marsaglia polar method without spare caching: the stream then depends
  // only on the call sequence, not on internal parity.
  for (;;) {
    double x = 2.0 * uniform() - 1.0;
    double y = 2.0 * uniform() - 1.0;
    double s = x * x + y * y;
    if (s > 0.0 && s < 1.0) return x * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0) || !(scale > 0))
    throw std::invalid_argument("gamma shape and scale must be > 0");
  if (shape < 1.0) {
    double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform(), 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

double sample_positive_stable(double alpha, Rng& rng) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("stable alpha must be in (0,1]");
  if (alpha == 1.0) return 1.0;  // deterministic drift clock
  const double pi = 3.14159265358979323846;
  double v = pi * rng.uniform();           // uniform on (0, pi)
  double w = rng.exponential(1.0);
  double s1 = std::sin(alpha * v);
  double s2 = std::sin((1.0 - alpha) * v);
  double sv = std::sin(v);
  return (s1 / std::pow(sv, 1.0 / alpha)) *
         std::pow(s2 / w, (1.0 - alpha) / alpha);
}

}  // namespace ptproc
