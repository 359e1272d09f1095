#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ptproc/bdm.hpp"
#include "ptproc/table.hpp"

namespace ptproc::oracle {

/* Dense generator of a finite continuous-time Markov chain, with an explicit
 * state labelling.  Used as an independent numerical reference for the
 * closed-form laws. */
struct FiniteGenerator {
  std::vector<std::array<int, 2>> states;  // label of each index
  std::vector<double> q;                   // row-major dim x dim

  std::size_t dim() const { return states.size(); }
  double& entry(std::size_t i, std::size_t j) { return q[i * dim() + j]; }
  double entry(std::size_t i, std::size_t j) const { return q[i * dim() + j]; }
  std::size_t index_of(std::array<int, 2> s) const;  // throws if absent

  /* Off-diagonal entries non-negative, rows summing to ~0. */
  void check_conservative(double tol = 1e-9) const;
};

/* Death-migration chain on the simplex {(m, n): m + n <= n1 + n2}.  Needs
 * zero birth rates. */
FiniteGenerator death_migration_generator(const bdm::BdmSpec& spec);

/* Pure-migration chain on {0, ..., n1 + n2} tracking the group-1 count
 * (second label coordinate unused, set to 0). */
FiniteGenerator pure_migration_generator(const bdm::PureMigrationSpec& spec);

/* Linear birth-death generator truncated to {0, ..., cap}; the top state
 * keeps its death rate but its birth rate is dropped (mass reaching the cap
 * is reported by the caller via the returned distribution's tail). */
FiniteGenerator birth_death_generator(double lambda, double mu, int cap);

/* exp(Q^T t) p0 by uniformization.  `tail` bounds the dropped Poisson mass. */
std::vector<double> transient_pmf(const FiniteGenerator& gen,
                                  const std::vector<double>& p0, double t,
                                  double tail = 1e-14);

/* Stationary law pi of an irreducible chain: pi Q = 0, sum pi = 1. */
std::vector<double> stationary(const FiniteGenerator& gen);

/* Law at time "1" of  initial + sum_i jump_i * Poisson(mean_i), restricted
 * to the box [lo, hi].  Exact up to the per-component Poisson tail
 * truncation; the unreturned mass is reported in truncation_bound.  Throws
 * if that bound exceeds max_truncation. */
Table2 poisson_convolution_pmf(const std::vector<std::array<int, 2>>& jumps,
                               const std::vector<double>& means,
                               std::array<int, 2> initial,
                               std::array<int, 2> lo, std::array<int, 2> hi,
                               double tail = 1e-15,
                               double max_truncation = 1e-6);

}  // namespace ptproc::oracle
