#pragma once

#include <array>
#include <functional>
#include <utility>

#include "ptproc/path.hpp"
#include "ptproc/ratefn.hpp"
#include "ptproc/rng.hpp"
#include "ptproc/table.hpp"

namespace ptproc::bdm {

/* Two interacting populations.  Group i individuals give birth at rate
 * lambda_i, die at rate mu_i, and migrate to the other group at rate eta_i
 * (all per capita, constant in time). */
struct BdmSpec {
  double lambda1 = 0.0, mu1 = 0.0, eta1 = 0.0;
  double lambda2 = 0.0, mu2 = 0.0, eta2 = 0.0;
  int n1 = 0, n2 = 0;

  void validate() const;
};

/* Closed form for (E N1(t), E N2(t)). */
std::pair<double, double> mean_vector(const BdmSpec& spec, double t);

/* First and second-order moments: means, mixed moment E N1 N2, and the
 * factorial moments E Ni(Ni - 1), obtained by integrating the moment ODE
 * system (exact up to integrator tolerance; independent of closed forms). */
struct Moments {
  double en1 = 0.0, en2 = 0.0;
  double en1n2 = 0.0;           // E N1 N2
  double fact1 = 0.0, fact2 = 0.0;  // E Ni (Ni - 1)

  double cov() const { return en1n2 - en1 * en2; }
  double var1() const { return fact1 + en1 - en1 * en1; }
  double var2() const { return fact2 + en2 - en2 * en2; }
};

Moments moments_ode(const BdmSpec& spec, double t, double abs_tol = 1e-10);

/* Closed-form second moments in the reduced regime lambda1 - mu1 =
 * lambda2 - mu2 and eta1 = eta2.  Throws std::domain_error near the
 * resonant parameter sets where the closed form degenerates (callers fall
 * back to moments_ode). */
Moments second_moments_reduced(const BdmSpec& spec, double t);

/* Event-by-event simulation of the full process. */
SamplePath<2> sample_gillespie(const BdmSpec& spec, double horizon, Rng& rng);

/* Residual of the PGF transport equation
 *   dG/dt = [l1 u^2 - (l1+m1+e1) u + m1 + e1 v] dG/du
 *         + [l2 v^2 - (l2+m2+e2) v + m2 + e2 u] dG/dv
 * evaluated with central differences of step h.  A correct PGF makes this
 * O(h^2) small. */
double pgf_pde_residual(const BdmSpec& spec,
                        const std::function<double(double, double, double)>& G,
                        double t, double u, double v, double h);

/* ---- death-migration specialisation (lambda1 = lambda2 = 0) ----
 * Every initial individual evolves independently; the time-t position of a
 * group-i ancestor is "in group 1" / "in group 2" / "dead" with
 * probabilities (Ai, Bi, 1 - Ai - Bi). */
struct OccupancyProbs {
  double a1 = 0.0, b1 = 0.0;  // group-1 ancestor: in group 1 / in group 2
  double a2 = 0.0, b2 = 0.0;  // group-2 ancestor: in group 1 / in group 2
};

OccupancyProbs occupancy_probs(const BdmSpec& spec, double t);

double death_migration_pmf(const BdmSpec& spec, double t, int m, int n);
Table2 death_migration_table(const BdmSpec& spec, double t);
double death_migration_pgf(const BdmSpec& spec, double t, double u, double v);
double death_migration_covariance(const BdmSpec& spec, double t);
double extinction_probability(const BdmSpec& spec, double t);

/* Mean time to extinction; needs equal death rates mu1 = mu2 > 0. */
double expected_extinction_time(const BdmSpec& spec);

/* P{T_k > t} where T_k is the first time the total population (which is
 * non-increasing under pure death-migration) reaches k. */
double first_passage_survival(const BdmSpec& spec, double t, int k);

/* PGF of the symmetric death-migration process with time-dependent common
 * death rate mu(t) and common migration rate eta(t). */
double symmetric_nonhomogeneous_pgf(const RateFunction& mu,
                                    const RateFunction& eta, int n1, int n2,
                                    double t, double u, double v);

/* ---- pure migration (no births, no deaths) ---- */
struct PureMigrationSpec {
  double eta1 = 0.0, eta2 = 0.0;  // 1 -> 2 and 2 -> 1 per-capita rates
  int n1 = 0, n2 = 0;

  void validate() const;
  int total() const { return n1 + n2; }
};

/* Probability that a group-1 (resp. group-2) ancestor sits in group 1 at t. */
std::pair<double, double> migration_occupancy(const PureMigrationSpec& spec,
                                              double t);

/* Law of N1(t): sum of two binomials. */
double pure_migration_pmf(const PureMigrationSpec& spec, double t, int k);
Table1 pure_migration_table(const PureMigrationSpec& spec, double t);
double pure_migration_pgf(const PureMigrationSpec& spec, double t, double u);

/* Limiting law of N1: Binomial(n1 + n2, eta2 / (eta1 + eta2)). */
Table1 pure_migration_stationary(const PureMigrationSpec& spec);

/* Residual of dG/dt = -eta2 n (1-u) G + (1-u)(eta1 + eta2 u) dG/du with
 * central differences of step h. */
double pure_migration_pde_residual(const PureMigrationSpec& spec, double t,
                                   double u, double h);

/* Gillespie simulation of N1 (state = group-1 headcount). */
SamplePath<1> sample_pure_migration(const PureMigrationSpec& spec,
                                    double horizon, Rng& rng);

/* ---- linear birth-death started from one individual ---- */

/* P{N(t) = k} for a linear birth-death process with per-capita rates
 * (lambda, mu), N(0) = 1.  The critical case lambda == mu is not covered. */
double bd_pmf(double lambda, double mu, double t, int k);

/* Law of N1(t) - N2(t) for independent linear birth-death processes, both
 * started from one individual. */
double bd_difference_pmf(double lambda1, double mu1, double lambda2,
                         double mu2, double t, int k);

}  // namespace ptproc::bdm
