#include "ptproc/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "ptproc/specfun.hpp"

namespace ptproc::stats {

namespace {

double chi_square_p(double statistic, int df) {
  if (df <= 0) return 1.0;
  return specfun::gamma_q(0.5 * df, 0.5 * statistic);
}

}  // namespace

ChiSquareResult chi_square_gof(const std::vector<double>& expected_counts,
                               const std::vector<std::uint64_t>& observed,
                               double extra_expected_mass,
                               std::uint64_t extra_observed,
                               double min_expected) {
  if (expected_counts.size() != observed.size())
    throw std::invalid_argument("gof: size mismatch");
  double stat = 0.0;
  int cells = 0;
  int pooled = 0;
  double pe = extra_expected_mass;  // running pooled cell
  double po = static_cast<double>(extra_observed);
  for (std::size_t i = 0; i < expected_counts.size(); ++i) {
    double e = expected_counts[i];
    double o = static_cast<double>(observed[i]);
    if (e < min_expected) {
      pe += e;
      po += o;
      ++pooled;
      continue;
    }
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  if (pe > 0.0) {
    stat += (po - pe) * (po - pe) / pe;
    ++cells;
  }
  ChiSquareResult r;
  r.statistic = stat;
  r.df = cells - 1;
  r.p_value = chi_square_p(stat, r.df);
  r.pooled_cells = pooled;
  return r;
}

ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b,
                                      double min_expected) {
  if (a.size() != b.size())
    throw std::invalid_argument("two-sample chi-square: size mismatch");
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  if (na == 0 || nb == 0)
    throw std::invalid_argument("two-sample chi-square: empty sample");
  // K. Pearson two-sample form with sample-size weighting; cells whose
  // combined count is small are pooled.
  double k1 = std::sqrt(nb / na), k2 = std::sqrt(na / nb);
  double stat = 0.0;
  int cells = 0;
  double pa = 0, pb = 0;
  bool have_pool = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double oa = static_cast<double>(a[i]);
    double ob = static_cast<double>(b[i]);
    if (oa + ob < min_expected) {
      pa += oa;
      pb += ob;
      have_pool = true;
      continue;
    }
    double d = k1 * oa - k2 * ob;
    stat += d * d / (oa + ob);
    ++cells;
  }
  if (have_pool && pa + pb > 0) {
    double d = k1 * pa - k2 * pb;
    stat += d * d / (pa + pb);
    ++cells;
  }
  ChiSquareResult r;
  r.statistic = stat;
  r.df = cells - 1;
  r.p_value = chi_square_p(stat, r.df);
  return r;
}

double dkw_epsilon(std::size_t n, double delta) {
  if (n == 0 || !(delta > 0) || !(delta < 1))
    throw std::invalid_argument("dkw_epsilon: need n > 0, delta in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double Accumulator::variance() const {
  if (n < 2) return 0.0;
  double m = mean();
  double v = (sumsq - static_cast<double>(n) * m * m) /
             (static_cast<double>(n) - 1.0);
  return v > 0 ? v : 0.0;
}

double Accumulator::se() const {
  return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

}  // namespace ptproc::stats
