#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <vector>

namespace ptproc {

/* Piecewise-constant cadlag path of a D-dimensional integer-valued process:
 * an initial state and a time-ordered list of integer jumps on (0, horizon]. */
template <int D>
struct SamplePath {
  std::array<int, D> initial{};
  double horizon = 0.0;
  struct Event {
    double time;
    std::array<int, D> jump;
  };
  std::vector<Event> events;

  std::array<int, D> state_at(double t) const {
    std::array<int, D> s = initial;
    for (const Event& e : events) {
      if (e.time > t) break;
      for (int d = 0; d < D; ++d) s[d] += e.jump[d];
    }
    return s;
  }

  std::array<int, D> endpoint() const { return state_at(horizon); }

  void check_valid() const {
    double prev = 0.0;
    for (const Event& e : events) {
      if (!(e.time > prev) || e.time > horizon)
        throw std::logic_error("sample path has out-of-order event times");
      bool moved = false;
      for (int d = 0; d < D; ++d) moved = moved || e.jump[d] != 0;
      if (!moved) throw std::logic_error("sample path has a null jump");
      prev = e.time;
    }
  }
};

/* Merge event streams by time (used to superpose independent sub-processes). */
template <int D>
void merge_events(SamplePath<D>& into, const std::vector<typename SamplePath<D>::Event>& more) {
  into.events.insert(into.events.end(), more.begin(), more.end());
  std::sort(into.events.begin(), into.events.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
}

}  // namespace ptproc
