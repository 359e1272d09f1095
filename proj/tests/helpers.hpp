#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <type_traits>
#include <vector>

#include "ptproc/stats.hpp"
#include "ptproc/table.hpp"

namespace testutil {

/* Chi-square GOF of an empirical histogram against a truncated pmf table.
 * Mass outside the table (bounded by truncation_bound) and observations
 * outside the box both land in the slack cell. */
template <int D>
ptproc::stats::ChiSquareResult gof_against_table(
    const ptproc::DistributionTable<D>& table,
    const std::type_identity_t<std::map<std::array<int, D>, std::uint64_t>>&
        counts,
    std::uint64_t n_total) {
  std::vector<double> expected(table.p.size());
  std::vector<std::uint64_t> observed(table.p.size(), 0);
  for (std::size_t i = 0; i < table.p.size(); ++i)
    expected[i] = table.p[i] * static_cast<double>(n_total);
  std::uint64_t outside = 0;
  for (const auto& [state, c] : counts) {
    if (table.contains(state))
      observed[table.index(state)] += c;
    else
      outside += c;
  }
  const double slack =
      table.truncation_bound * static_cast<double>(n_total);
  return ptproc::stats::chi_square_gof(expected, observed, slack, outside);
}

/* Histogram block for mc::run_replicates over D-dimensional endpoints. */
template <int D>
struct HistBlock {
  std::map<std::array<int, D>, std::uint64_t> counts;
  void merge(const HistBlock& o) {
    for (const auto& [k, v] : o.counts) counts[k] += v;
  }
  void add(std::array<int, D> s) { ++counts[s]; }
};

}  // namespace testutil
