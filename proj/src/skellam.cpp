#include "ptproc/skellam.hpp"

#include <cmath>
#include <stdexcept>

namespace ptproc::skellam {

void GeneralizedSkellamSpec::validate() const {
  if (rates.count(0))
    throw std::invalid_argument("generalized Skellam spec: jump 0 not allowed");
  if (rates.empty())
    throw std::invalid_argument("generalized Skellam spec: no jumps");
}

double log_poisson_pmf(double mean, int k) {
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (mean == 0.0)
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double poisson_pmf(const NhPoissonSpec& spec, double t, int k) {
  return std::exp(log_poisson_pmf(spec.rate.cumulative(t), k));
}

double skellam_pmf(const NhSkellamSpec& spec, double t, int n) {
  const double lu = spec.rate_up.cumulative(t);
  const double ld = spec.rate_down.cumulative(t);
  const int m = n - spec.initial;  // net increment
  if (lu == 0.0 && ld == 0.0) return m == 0 ? 1.0 : 0.0;
  if (ld == 0.0) return std::exp(log_poisson_pmf(lu, m));
  if (lu == 0.0) return std::exp(log_poisson_pmf(ld, -m));
  // e^{-(Lu+Ld)} (Lu/Ld)^{m/2} I_m(2 sqrt(Lu Ld)), assembled in log space.
  double logp = -(lu + ld) + 0.5 * m * (std::log(lu) - std::log(ld)) +
                specfun::log_bessel_i(m, 2.0 * std::sqrt(lu * ld));
  return std::exp(logp);
}

double skellam_pgf(const NhSkellamSpec& spec, double t, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("skellam_pgf requires u > 0");
  const double lu = spec.rate_up.cumulative(t);
  const double ld = spec.rate_down.cumulative(t);
  return std::pow(u, spec.initial) *
         std::exp(-lu * (1.0 - u) - ld * (1.0 - 1.0 / u));
}

double generalized_pgf(const GeneralizedSkellamSpec& spec, double t, double u) {
  spec.validate();
  if (!(u > 0.0))
    throw std::invalid_argument("generalized_pgf requires u > 0");
  double expo = 0.0;
  for (const auto& [jump, rate] : spec.rates)
    expo -= rate.cumulative(t) * (1.0 - std::pow(u, jump));
  return std::exp(expo);
}

int poisson_tail_quantile(double mean, double tail) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  const double log_tail = std::log(tail);
  // Smallest N >= 2*mean with N ln(mean) - ln N! <= ln tail; the geometric
  // remainder of the Poisson tail beyond such N is bounded by twice the term.
  int n = static_cast<int>(std::ceil(2.0 * mean)) + 2;
  for (;; ++n) {
    double lt = n * std::log(mean) - std::lgamma(n + 1.0);
    if (lt <= log_tail) return n;
    if (n > 100000000)
      throw std::runtime_error("poisson_tail_quantile: no convergence");
  }
}

void skellam_support(const NhSkellamSpec& spec, double t, double tail, int& lo,
                     int& hi) {
  const double lu = spec.rate_up.cumulative(t);
  const double ld = spec.rate_down.cumulative(t);
  hi = spec.initial + poisson_tail_quantile(lu, tail);
  lo = spec.initial - poisson_tail_quantile(ld, tail);
}

Table1 skellam_table(const NhSkellamSpec& spec, double t, double tail) {
  int lo, hi;
  skellam_support(spec, t, tail, lo, hi);
  Table1 tab = Table1::box({lo}, {hi});
  for (int n = lo; n <= hi; ++n) tab.at({n}) = skellam_pmf(spec, t, n);
  tab.truncation_bound = 2.0 * tail;
  return tab;
}

SamplePath<1> sample_nh_poisson(const NhPoissonSpec& spec, double horizon,
                                Rng& rng) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be finite and >= 0");
  SamplePath<1> path;
  path.horizon = horizon;
  if (horizon == 0.0) return path;
  // Thinning per rate segment: between consecutive knots the local sup is a
  // tight majorant for the three public kinds.
  std::vector<double> cuts = spec.rate.knots_between(0.0, horizon);
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(horizon);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double m = spec.rate.sup_on(a, b);
    if (m <= 0.0) continue;
    double s = a;
    for (;;) {
      s += rng.exponential(m);
      if (s >= b) break;
      if (rng.uniform() * m <= spec.rate.value(s))
        path.events.push_back({s, {1}});
    }
  }
  return path;
}

SamplePath<1> sample_skellam(const NhSkellamSpec& spec, double horizon,
                             Rng& rng) {
  SamplePath<1> up = sample_nh_poisson({spec.rate_up}, horizon, rng);
  SamplePath<1> down = sample_nh_poisson({spec.rate_down}, horizon, rng);
  SamplePath<1> path;
  path.initial = {spec.initial};
  path.horizon = horizon;
  path.events = up.events;
  for (auto& e : down.events) e.jump = {-1};
  merge_events(path, down.events);
  return path;
}

}  // namespace ptproc::skellam
