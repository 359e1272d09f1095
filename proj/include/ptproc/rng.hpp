#pragma once

#include <cstdint>
#include <random>

namespace ptproc {

/* Counter-based seed derivation: replicate r of a run with master seed m gets
 * the seed mix_seed(m, r). splitmix64 is a bijective mixer, so distinct
 * replicate indices give distinct, decorrelated seeds and the mapping is
 * independent of how replicates are distributed over worker threads. */
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter);

/* Thin wrapper around mt19937_64 with the variate transforms we need.
 * All transforms are written out explicitly (no std::*_distribution) so a
 * given seed produces the same stream on every standard library. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1); never returns 0 or 1, safe for log().
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  double exponential(double rate);
  double normal();
  // Gamma(shape, scale) by Marsaglia-Tsang, with the shape<1 boost step.
  double gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
};

inline Rng replicate_rng(std::uint64_t master, std::uint64_t replicate) {
  return Rng(mix_seed(master, replicate));
}

/* One-sided positive stable variable S_alpha with E exp(-s S) = exp(-s^alpha),
 * alpha in (0,1], by Kanter's representation. alpha = 1 is the degenerate
 * point mass at 1. */
double sample_positive_stable(double alpha, Rng& rng);

}  // namespace ptproc
