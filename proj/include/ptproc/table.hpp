#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ptproc {

/* Truncated pmf over a box of lattice states, with the mass that may have
 * been cut off declared explicitly. This is the common currency passed
 * between closed-form engines and numerical oracles. */
template <int D>
struct DistributionTable {
  std::array<int, D> lo{};
  std::array<int, D> extent{};
  std::vector<double> p;
  double truncation_bound = 0.0;

  static DistributionTable box(std::array<int, D> lo_, std::array<int, D> hi_) {
    DistributionTable t;
    t.lo = lo_;
    std::size_t n = 1;
    for (int d = 0; d < D; ++d) {
      if (hi_[d] < lo_[d]) throw std::invalid_argument("empty table box");
      t.extent[d] = hi_[d] - lo_[d] + 1;
      n *= static_cast<std::size_t>(t.extent[d]);
    }
    t.p.assign(n, 0.0);
    return t;
  }

  bool contains(std::array<int, D> s) const {
    for (int d = 0; d < D; ++d)
      if (s[d] < lo[d] || s[d] >= lo[d] + extent[d]) return false;
    return true;
  }

  std::size_t index(std::array<int, D> s) const {
    std::size_t idx = 0;
    for (int d = 0; d < D; ++d)
      idx = idx * static_cast<std::size_t>(extent[d]) +
            static_cast<std::size_t>(s[d] - lo[d]);
    return idx;
  }

  std::array<int, D> state_of(std::size_t idx) const {
    std::array<int, D> s{};
    for (int d = D - 1; d >= 0; --d) {
      s[d] = lo[d] + static_cast<int>(idx % static_cast<std::size_t>(extent[d]));
      idx /= static_cast<std::size_t>(extent[d]);
    }
    return s;
  }

  double prob(std::array<int, D> s) const {
    return contains(s) ? p[index(s)] : 0.0;
  }

  double& at(std::array<int, D> s) {
    if (!contains(s)) throw std::out_of_range("state outside table box");
    return p[index(s)];
  }

  double total() const {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
  }
};

using Table1 = DistributionTable<1>;
using Table2 = DistributionTable<2>;

}  // namespace ptproc
