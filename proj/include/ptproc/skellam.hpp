#pragma once

#include <map>

#include "ptproc/path.hpp"
#include "ptproc/ratefn.hpp"
#include "ptproc/rng.hpp"
#include "ptproc/specfun.hpp"
#include "ptproc/table.hpp"

namespace ptproc::skellam {

/* Non-homogeneous Poisson counting process with intensity rate(t). */
struct NhPoissonSpec {
  RateFunction rate;
};

/* Difference of two independent non-homogeneous Poisson streams (+1 jumps at
 * rate_up, -1 jumps at rate_down), started at `initial`. */
struct NhSkellamSpec {
  RateFunction rate_up;
  RateFunction rate_down;
  int initial = 0;
};

/* Superposition of independent Poisson streams with integer jump sizes:
 * jump j occurs at rate rates.at(j). Jump 0 is rejected. No initial state:
 * this type describes increments only. */
struct GeneralizedSkellamSpec {
  std::map<int, RateFunction> rates;
  void validate() const;
};

/* Poisson pmf with mean = rate.cumulative(t). */
double poisson_pmf(const NhPoissonSpec& spec, double t, int k);
double log_poisson_pmf(double mean, int k);

/* P{S(t) = n} for the Skellam difference, Bessel closed form; the degenerate
 * branches (either cumulative rate zero) reduce to shifted Poisson laws. */
double skellam_pmf(const NhSkellamSpec& spec, double t, int n);

/* E u^{S(t)} = u^{initial} exp(-Lu(t)(1-u) - Ld(t)(1-1/u)), any u > 0. */
double skellam_pgf(const NhSkellamSpec& spec, double t, double u);

/* E u^{X(t)} = exp(-sum_j L_j(t)(1-u^j)), any u > 0. */
double generalized_pgf(const GeneralizedSkellamSpec& spec, double t, double u);

/* Smallest N with P{Poisson(mean) > N} <= tail (via the Lambda^N/N! bound). */
int poisson_tail_quantile(double mean, double tail);

/* Box [lo, hi] containing S(t) - that is, including the initial state - up to
 * Poisson-tail mass <= tail in each direction. */
void skellam_support(const NhSkellamSpec& spec, double t, double tail, int& lo,
                     int& hi);

/* Thinning sampler (majorant per rate segment). Events carry +1 jumps. */
SamplePath<1> sample_nh_poisson(const NhPoissonSpec& spec, double horizon,
                                Rng& rng);

/* Superposed up/down thinning sampler; events carry +-1 jumps. */
SamplePath<1> sample_skellam(const NhSkellamSpec& spec, double horizon,
                             Rng& rng);

/* Truncated pmf table for S(t) over its tail-bounded support. */
Table1 skellam_table(const NhSkellamSpec& spec, double t, double tail = 1e-12);

}  // namespace ptproc::skellam
