#pragma once

#include <array>
#include <vector>

#include "ptproc/bdm.hpp"
#include "ptproc/interact.hpp"
#include "ptproc/oracle.hpp"
#include "ptproc/rng.hpp"

namespace ptproc::timechange {

/* A driftless/killed subordinator clock described through its Laplace
 * exponent f:  E exp(-x H(u)) = exp(-u f(x)),
 *   f(x) = kill + drift * x + (family part).
 * Families:
 *   Stable:        x^alpha, alpha in (0, 1]
 *   Gamma:         shape * log(1 + x / rate)
 *   TabulatedTail: x * int_0^inf exp(-x w) T(w) dw with T a tabulated
 *                  non-increasing tail of the jump measure (evaluation
 *                  only; no sampler).
 */
struct BernsteinSpec {
  enum class Family { Stable, Gamma, TabulatedTail };
  Family family = Family::Stable;
  double alpha = 0.5;
  double gamma_shape = 1.0;
  double gamma_rate = 1.0;
  std::vector<double> tail_grid, tail_values;
  double drift = 0.0;
  double kill = 0.0;

  void validate() const;
};

/* Laplace exponent f(x), x >= 0. */
double levy_symbol(const BernsteinSpec& spec, double x);

/* Sample H at the given strictly increasing positive grid points.  After an
 * exponential killing epoch the path is +infinity. */
std::vector<double> sample_subordinator(const BernsteinSpec& spec,
                                        const std::vector<double>& x_grid,
                                        Rng& rng);

/* One draw of the inverse clock L(t) = inf{x : H(x) > t}.
 *
 * Stable (no drift): exact via L(t) =d (t / S)^alpha with S positive
 * alpha-stable.  Gamma: bracket the crossing with coarse increments, then
 * bisect by conditional beta splitting down to resolution
 * dx = t * resolution_factor (bias below dx/2).  Killing caps the draw at an
 * independent Exp(kill) level. */
double sample_inverse(const BernsteinSpec& spec, double t, Rng& rng,
                      double resolution_factor = 1e-4);

/* L at several times along one path, to step dx, by forward simulation of H
 * on a uniform grid (one common path; monotone in t by construction). */
std::vector<double> sample_inverse_path(const BernsteinSpec& spec,
                                        const std::vector<double>& t_grid,
                                        Rng& rng, double dx);

/* E exp(-y L(t)) for the driftless unkilled stable clock:
 * Mittag-Leffler E_alpha(-y t^alpha). */
double laplace_of_inverse(const BernsteinSpec& spec, double t, double y);

/* Survival P{J > t} of the first waiting time of a renewal process obtained
 * by time-changing a Poisson-type stream of total rate `rate` with the
 * inverse stable clock. */
double renewal_waiting_survival(const BernsteinSpec& spec, double rate,
                                double t);

/* Solution of the fractional Kolmogorov system
 *   D_t^alpha p = Q^T p,  p(0) = p0
 * for a finite chain: spectral Mittag-Leffler expansion when Q^T is
 * diagonalisable with a well-conditioned eigenbasis, otherwise numerical
 * Laplace inversion (fixed Talbot); `laplace_fallback` records which route
 * ran.  Equals the law of the chain run on an inverse stable clock. */
struct FractionalResult {
  std::vector<double> pmf;
  std::vector<double> eigenvalues;                // empty on fallback
  std::vector<std::vector<double>> coefficients;  // [state][mode]
  bool laplace_fallback = false;
};

FractionalResult fractional_distribution(const oracle::FiniteGenerator& gen,
                                         double alpha, double t,
                                         const std::vector<double>& p0);

/* Endpoint of the base process run up to an independently drawn L(t).
 * The base must be time-homogeneous. */
std::array<int, 2> time_changed_endpoint(
    const interact::InteractingSkellamSpec& base, const BernsteinSpec& clock,
    double t, Rng& rng);
std::array<int, 2> time_changed_endpoint(const bdm::BdmSpec& base,
                                         const BernsteinSpec& clock, double t,
                                         Rng& rng);
int time_changed_endpoint(const bdm::PureMigrationSpec& base,
                          const BernsteinSpec& clock, double t, Rng& rng);

}  // namespace ptproc::timechange
