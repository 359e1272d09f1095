#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace ptproc::stats {

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  double pooled_cells = 0;  // cells merged to keep expected counts >= 5
};

/* Goodness of fit of observed counts against expected counts (same total).
 * Cells with expected count < min_expected are pooled, standard practice for
 * chi-square validity; a final slack cell absorbs any probability mass the
 * caller left out of the cell list. */
ChiSquareResult chi_square_gof(const std::vector<double>& expected_counts,
                               const std::vector<std::uint64_t>& observed,
                               double extra_expected_mass = 0.0,
                               std::uint64_t extra_observed = 0,
                               double min_expected = 5.0);

/* Two-sample chi-square homogeneity test on paired counts over common cells
 * (unequal totals allowed). */
ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b,
                                      double min_expected = 5.0);

/* Dvoretzky-Kiefer-Wolfowitz band half-width for an ecdf of n samples at
 * confidence 1 - delta. */
double dkw_epsilon(std::size_t n, double delta);

/* Streaming mean/variance accumulator (merged deterministically by the MC
 * runner; see mc.hpp). */
struct Accumulator {
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  void merge(const Accumulator& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double variance() const;
  double se() const;
};

}  // namespace ptproc::stats
