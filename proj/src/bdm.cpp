#include "ptproc/bdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptproc/ode.hpp"
#include "ptproc/specfun.hpp"

namespace ptproc::bdm {

namespace {

void require_nonneg(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::invalid_argument(std::string("bdm: ") + what +
                                " must be finite and non-negative");
}

void require_death_migration(const BdmSpec& spec) {
  if (spec.lambda1 != 0.0 || spec.lambda2 != 0.0)
    throw std::invalid_argument(
        "bdm: this closed form needs zero birth rates");
}

/* P{ancestor ends in cat 1 / cat 2} = (a, b): multinomial point mass for a
 * single group of n exchangeable individuals. */
double multinomial_term(int n, int i, int j, double a, double b) {
  if (i < 0 || j < 0 || i + j > n) return 0.0;
  double rest = 1.0 - a - b;
  if (rest < 0.0) rest = 0.0;
  if ((a == 0.0 && i > 0) || (b == 0.0 && j > 0) || (rest == 0.0 && i + j < n))
    return 0.0;
  double lg = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
              std::lgamma(j + 1.0) - std::lgamma(n - i - j + 1.0);
  if (i > 0) lg += i * std::log(a);
  if (j > 0) lg += j * std::log(b);
  if (n - i - j > 0) lg += (n - i - j) * std::log(rest);
  return std::exp(lg);
}

double binomial_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
              std::lgamma(n - k + 1.0) + k * std::log(p) +
              (n - k) * std::log1p(-p);
  return std::exp(lg);
}

}  // namespace

void BdmSpec::validate() const {
  require_nonneg(lambda1, "lambda1");
  require_nonneg(mu1, "mu1");
  require_nonneg(eta1, "eta1");
  require_nonneg(lambda2, "lambda2");
  require_nonneg(mu2, "mu2");
  require_nonneg(eta2, "eta2");
  if (n1 < 0 || n2 < 0)
    throw std::invalid_argument("bdm: initial counts must be non-negative");
}

std::pair<double, double> mean_vector(const BdmSpec& spec, double t) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double l = (spec.mu1 + spec.eta1 - spec.lambda1) +
                   (spec.mu2 + spec.eta2 - spec.lambda2);
  const double m = (spec.mu1 + spec.eta1 - spec.lambda1) -
                   (spec.mu2 + spec.eta2 - spec.lambda2);
  const double r = std::sqrt(m * m + 4.0 * spec.eta1 * spec.eta2);
  const double decay = std::exp(-0.5 * l * t);
  const double ch = std::cosh(0.5 * r * t);
  const double shc = 0.5 * t * specfun::sinhc(0.5 * r * t);  // sinh(rt/2)/r
  double m1 = decay * (spec.n1 * ch + (2.0 * spec.n2 * spec.eta2 -
                                       spec.n1 * m) * shc);
  double m2 = decay * (spec.n2 * ch + (2.0 * spec.n1 * spec.eta1 +
                                       spec.n2 * m) * shc);
  return {m1, m2};
}

Moments moments_ode(const BdmSpec& spec, double t, double abs_tol) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double a1 = spec.lambda1 - spec.mu1 - spec.eta1;
  const double a2 = spec.lambda2 - spec.mu2 - spec.eta2;
  auto f = [&](double, const std::array<double, 5>& y) {
    // y = (m1, m2, sigma, sigma1, sigma2)
    std::array<double, 5> d;
    d[0] = a1 * y[0] + spec.eta2 * y[1];
    d[1] = spec.eta1 * y[0] + a2 * y[1];
    d[2] = (a1 + a2) * y[2] + spec.eta1 * y[3] + spec.eta2 * y[4];
    d[3] = 2.0 * a1 * y[3] + 2.0 * spec.lambda1 * y[0] + 2.0 * spec.eta2 * y[2];
    d[4] = 2.0 * a2 * y[4] + 2.0 * spec.lambda2 * y[1] + 2.0 * spec.eta1 * y[2];
    return d;
  };
  std::array<double, 5> y0 = {
      double(spec.n1), double(spec.n2), double(spec.n1) * spec.n2,
      double(spec.n1) * (spec.n1 - 1), double(spec.n2) * (spec.n2 - 1)};
  auto y = ode::integrate<5>(f, 0.0, t, y0, abs_tol);
  return Moments{y[0], y[1], y[2], y[3], y[4]};
}

Moments second_moments_reduced(const BdmSpec& spec, double t) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double scale = 1.0 + spec.lambda1 + spec.mu1 + spec.lambda2 +
                       spec.mu2 + spec.eta1 + spec.eta2;
  if (std::abs((spec.lambda1 - spec.mu1) - (spec.lambda2 - spec.mu2)) >
          1e-12 * scale ||
      std::abs(spec.eta1 - spec.eta2) > 1e-12 * scale)
    throw std::invalid_argument(
        "bdm: reduced closed form needs equal growth rates and equal "
        "migration rates");
  const double alpha = spec.lambda1 - spec.mu1;
  const double eta = spec.eta1;
  // Degenerate mode spacings: the undetermined-coefficient solution divides
  // by these quantities.
  const double guard = 1e-8;
  if (std::abs(eta) < guard || std::abs(alpha) < guard ||
      std::abs(alpha - 2.0 * eta) < guard ||
      std::abs(alpha + 2.0 * eta) < guard ||
      std::abs(alpha - 4.0 * eta) < guard)
    throw std::domain_error(
        "bdm: resonant parameters; use the moment ODE route");

  const double n1 = spec.n1, n2 = spec.n2;
  const double a = (spec.lambda1 + spec.lambda2) * (n1 + n2);
  const double b = (spec.lambda1 - spec.lambda2) * (n1 - n2);
  const double fa = eta * a / (alpha * (alpha - 4.0 * eta));
  const double fb = eta * b / (alpha * alpha - 4.0 * eta * eta);

  const double sigma0 = n1 * n2;
  const double fact10 = n1 * (n1 - 1.0);
  const double fact20 = n2 * (n2 - 1.0);
  const double dsigma0 =
      2.0 * (alpha - eta) * sigma0 + eta * (fact10 + fact20);
  const double sum_ab = sigma0 - fa - fb;
  const double rhs =
      dsigma0 - alpha * fa - (alpha - 2.0 * eta) * fb;
  const double coef_a =
      (rhs - 2.0 * (alpha - 2.0 * eta) * sum_ab) / (4.0 * eta);
  const double coef_b = sum_ab - coef_a;

  const double e2a = std::exp(2.0 * alpha * t);
  const double e2b = std::exp(2.0 * (alpha - 2.0 * eta) * t);
  const double ea = std::exp(alpha * t);
  const double eb = std::exp((alpha - 2.0 * eta) * t);
  const double eh = std::exp(2.0 * (alpha - eta) * t);

  const double sigma = coef_a * e2a + coef_b * e2b + fa * ea + fb * eb;

  auto fact_moment = [&](double lam, double diff0, double anchor) {
    // E N(N-1) for one group: modes 2a, 2(a-2e), a, a-2e plus homogeneous
    // 2(a-e); diff0 = +-(n1-n2) as seen from this group.
    const double ca = (2.0 * eta * fa + lam * (n1 + n2)) / (2.0 * eta - alpha);
    const double cb = (2.0 * eta * fb + lam * diff0) / (-alpha);
    const double c0 = anchor - coef_a + coef_b - ca - cb;
    return coef_a * e2a - coef_b * e2b + ca * ea + cb * eb + c0 * eh;
  };
  const double fact1 = fact_moment(spec.lambda1, n1 - n2, fact10);
  const double fact2 = fact_moment(spec.lambda2, n2 - n1, fact20);

  auto [m1, m2] = mean_vector(spec, t);
  return Moments{m1, m2, sigma, fact1, fact2};
}

SamplePath<2> sample_gillespie(const BdmSpec& spec, double horizon, Rng& rng) {
  spec.validate();
  if (!(horizon > 0.0))
    throw std::invalid_argument("bdm: horizon must be positive");
  SamplePath<2> path;
  path.initial = {spec.n1, spec.n2};
  path.horizon = horizon;
  int x = spec.n1, y = spec.n2;
  double t = 0.0;
  static constexpr std::array<std::array<int, 2>, 6> kJumps = {{
      {1, 0}, {-1, 0}, {-1, 1}, {0, 1}, {0, -1}, {1, -1},
  }};
  for (;;) {
    const double rates[6] = {spec.lambda1 * x, spec.mu1 * x, spec.eta1 * x,
                             spec.lambda2 * y, spec.mu2 * y, spec.eta2 * y};
    double total = 0.0;
    for (double r : rates) total += r;
    if (total <= 0.0) break;
    t += rng.exponential(total);
    if (t > horizon) break;
    double pick = rng.uniform() * total;
    int which = 0;
    for (; which < 5; ++which) {
      if (pick < rates[which]) break;
      pick -= rates[which];
    }
    x += kJumps[which][0];
    y += kJumps[which][1];
    path.events.push_back({t, kJumps[which]});
  }
  return path;
}

double pgf_pde_residual(const BdmSpec& spec,
                        const std::function<double(double, double, double)>& G,
                        double t, double u, double v, double h) {
  if (!(h > 0.0) || t - h < 0.0)
    throw std::invalid_argument("bdm: need h > 0 and t >= h");
  const double gt = (G(t + h, u, v) - G(t - h, u, v)) / (2.0 * h);
  const double gu = (G(t, u + h, v) - G(t, u - h, v)) / (2.0 * h);
  const double gv = (G(t, u, v + h) - G(t, u, v - h)) / (2.0 * h);
  const double c1 = spec.lambda1 * u * u -
                    (spec.lambda1 + spec.mu1 + spec.eta1) * u + spec.mu1 +
                    spec.eta1 * v;
  const double c2 = spec.lambda2 * v * v -
                    (spec.lambda2 + spec.mu2 + spec.eta2) * v + spec.mu2 +
                    spec.eta2 * u;
  return gt - c1 * gu - c2 * gv;
}

OccupancyProbs occupancy_probs(const BdmSpec& spec, double t) {
  spec.validate();
  require_death_migration(spec);
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double l = spec.mu1 + spec.mu2 + spec.eta1 + spec.eta2;
  const double m = spec.mu1 - spec.mu2 + spec.eta1 - spec.eta2;
  const double r = std::sqrt(m * m + 4.0 * spec.eta1 * spec.eta2);
  const double decay = std::exp(-0.5 * l * t);
  const double ch = std::cosh(0.5 * r * t);
  const double shc = 0.5 * t * specfun::sinhc(0.5 * r * t);
  OccupancyProbs out;
  out.a1 = decay * (ch - m * shc);
  out.b1 = decay * 2.0 * spec.eta1 * shc;
  out.a2 = decay * 2.0 * spec.eta2 * shc;
  out.b2 = decay * (ch + m * shc);
  return out;
}

double death_migration_pmf(const BdmSpec& spec, double t, int m, int n) {
  if (m < 0 || n < 0 || m + n > spec.n1 + spec.n2) return 0.0;
  const auto oc = occupancy_probs(spec, t);
  double p = 0.0;
  for (int i = 0; i <= std::min(spec.n1, m); ++i) {
    for (int j = 0; j <= std::min(spec.n1 - i, n); ++j) {
      const double w1 = multinomial_term(spec.n1, i, j, oc.a1, oc.b1);
      if (w1 == 0.0) continue;
      p += w1 * multinomial_term(spec.n2, m - i, n - j, oc.a2, oc.b2);
    }
  }
  return p;
}

Table2 death_migration_table(const BdmSpec& spec, double t) {
  const int total = spec.n1 + spec.n2;
  Table2 table = Table2::box({0, 0}, {total, total});
  double sum = 0.0;
  for (int m = 0; m <= total; ++m)
    for (int n = 0; n <= total; ++n) {
      const double p = death_migration_pmf(spec, t, m, n);
      table.p[table.index({m, n})] = p;
      sum += p;
    }
  table.truncation_bound = std::abs(1.0 - sum);
  return table;
}

double death_migration_pgf(const BdmSpec& spec, double t, double u, double v) {
  const auto oc = occupancy_probs(spec, t);
  const double f1 = 1.0 - oc.a1 * (1.0 - u) - oc.b1 * (1.0 - v);
  const double f2 = 1.0 - oc.a2 * (1.0 - u) - oc.b2 * (1.0 - v);
  return std::pow(f1, spec.n1) * std::pow(f2, spec.n2);
}

double death_migration_covariance(const BdmSpec& spec, double t) {
  const auto oc = occupancy_probs(spec, t);
  return -spec.n1 * oc.a1 * oc.b1 - spec.n2 * oc.a2 * oc.b2;
}

double extinction_probability(const BdmSpec& spec, double t) {
  const auto oc = occupancy_probs(spec, t);
  return std::pow(1.0 - oc.a1 - oc.b1, spec.n1) *
         std::pow(1.0 - oc.a2 - oc.b2, spec.n2);
}

double expected_extinction_time(const BdmSpec& spec) {
  spec.validate();
  require_death_migration(spec);
  const double scale = 1.0 + spec.mu1 + spec.mu2;
  if (std::abs(spec.mu1 - spec.mu2) > 1e-12 * scale || spec.mu1 <= 0.0)
    throw std::invalid_argument(
        "bdm: extinction time closed form needs equal positive death rates");
  return specfun::harmonic_number(spec.n1 + spec.n2) / spec.mu1;
}

double first_passage_survival(const BdmSpec& spec, double t, int k) {
  spec.validate();
  require_death_migration(spec);
  const int total = spec.n1 + spec.n2;
  if (k < 0) return 1.0;
  if (k >= total) return 0.0;
  const auto oc = occupancy_probs(spec, t);
  const double p1 = oc.a1 + oc.b1;  // group-1 ancestor still alive
  const double p2 = oc.a2 + oc.b2;
  // P{alive(t) > k} with alive = Bin(n1, p1) + Bin(n2, p2).
  double tail = 0.0;
  for (int i = 0; i <= spec.n1; ++i) {
    const double w = binomial_pmf(spec.n1, i, p1);
    if (w == 0.0) continue;
    for (int j = std::max(0, k + 1 - i); j <= spec.n2; ++j)
      tail += w * binomial_pmf(spec.n2, j, p2);
  }
  return tail;
}

double symmetric_nonhomogeneous_pgf(const RateFunction& mu,
                                    const RateFunction& eta, int n1, int n2,
                                    double t, double u, double v) {
  if (n1 < 0 || n2 < 0)
    throw std::invalid_argument("bdm: initial counts must be non-negative");
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double s = std::exp(-mu.cumulative(0.0, t));
  const double w = std::exp(-2.0 * eta.cumulative(0.0, t));
  const double a = 0.5 * s * (1.0 + w);
  const double b = 0.5 * s * (1.0 - w);
  return std::pow(1.0 - a * (1.0 - u) - b * (1.0 - v), n1) *
         std::pow(1.0 - b * (1.0 - u) - a * (1.0 - v), n2);
}

void PureMigrationSpec::validate() const {
  require_nonneg(eta1, "eta1");
  require_nonneg(eta2, "eta2");
  if (n1 < 0 || n2 < 0)
    throw std::invalid_argument("bdm: initial counts must be non-negative");
}

std::pair<double, double> migration_occupancy(const PureMigrationSpec& spec,
                                              double t) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double s = spec.eta1 + spec.eta2;
  if (s == 0.0) return {1.0, 0.0};
  const double decay = std::exp(-s * t);
  return {(spec.eta2 + spec.eta1 * decay) / s,
          spec.eta2 * (1.0 - decay) / s};
}

double pure_migration_pmf(const PureMigrationSpec& spec, double t, int k) {
  if (k < 0 || k > spec.total()) return 0.0;
  const auto [p1, p2] = migration_occupancy(spec, t);
  double p = 0.0;
  for (int i = std::max(0, k - spec.n2); i <= std::min(spec.n1, k); ++i)
    p += binomial_pmf(spec.n1, i, p1) * binomial_pmf(spec.n2, k - i, p2);
  return p;
}

Table1 pure_migration_table(const PureMigrationSpec& spec, double t) {
  Table1 table = Table1::box({0}, {spec.total()});
  double sum = 0.0;
  for (int k = 0; k <= spec.total(); ++k) {
    const double p = pure_migration_pmf(spec, t, k);
    table.p[table.index({k})] = p;
    sum += p;
  }
  table.truncation_bound = std::abs(1.0 - sum);
  return table;
}

double pure_migration_pgf(const PureMigrationSpec& spec, double t, double u) {
  const auto [p1, p2] = migration_occupancy(spec, t);
  return std::pow(1.0 - p1 * (1.0 - u), spec.n1) *
         std::pow(1.0 - p2 * (1.0 - u), spec.n2);
}

Table1 pure_migration_stationary(const PureMigrationSpec& spec) {
  spec.validate();
  const double s = spec.eta1 + spec.eta2;
  if (s <= 0.0)
    throw std::invalid_argument(
        "bdm: stationary law needs a positive migration rate");
  const double p = spec.eta2 / s;
  Table1 table = Table1::box({0}, {spec.total()});
  for (int k = 0; k <= spec.total(); ++k)
    table.p[table.index({k})] = binomial_pmf(spec.total(), k, p);
  return table;
}

double pure_migration_pde_residual(const PureMigrationSpec& spec, double t,
                                   double u, double h) {
  if (!(h > 0.0) || t - h < 0.0)
    throw std::invalid_argument("bdm: need h > 0 and t >= h");
  const double gt = (pure_migration_pgf(spec, t + h, u) -
                     pure_migration_pgf(spec, t - h, u)) /
                    (2.0 * h);
  const double gu = (pure_migration_pgf(spec, t, u + h) -
                     pure_migration_pgf(spec, t, u - h)) /
                    (2.0 * h);
  const double g = pure_migration_pgf(spec, t, u);
  const double n = spec.total();
  return gt + spec.eta2 * n * (1.0 - u) * g -
         (1.0 - u) * (spec.eta1 + spec.eta2 * u) * gu;
}

SamplePath<1> sample_pure_migration(const PureMigrationSpec& spec,
                                    double horizon, Rng& rng) {
  spec.validate();
  if (!(horizon > 0.0))
    throw std::invalid_argument("bdm: horizon must be positive");
  SamplePath<1> path;
  path.initial = {spec.n1};
  path.horizon = horizon;
  int k = spec.n1;
  const int n = spec.total();
  double t = 0.0;
  for (;;) {
    const double out_rate = spec.eta1 * k;
    const double in_rate = spec.eta2 * (n - k);
    const double total = out_rate + in_rate;
    if (total <= 0.0) break;
    t += rng.exponential(total);
    if (t > horizon) break;
    const int jump = rng.uniform() * total < out_rate ? -1 : 1;
    k += jump;
    path.events.push_back({t, {jump}});
  }
  return path;
}

namespace {

struct BdLaw {
  double p0 = 0.0;     // P{N = 0}
  double first = 0.0;  // P{N = 1}
  double ratio = 0.0;  // P{N = k+1} / P{N = k} for k >= 1
};

BdLaw bd_law(double lambda, double mu, double t) {
  require_nonneg(lambda, "lambda");
  require_nonneg(mu, "mu");
  if (t < 0.0) throw std::invalid_argument("bdm: t must be non-negative");
  const double theta = lambda - mu;
  if (std::abs(theta) <= 1e-12 * (1.0 + lambda + mu))
    throw std::invalid_argument(
        "bdm: critical birth-death case (lambda == mu) not covered");
  BdLaw law;
  if (theta > 0.0) {
    const double decay = std::exp(-theta * t);  // <= 1
    const double denom = lambda - mu * decay;
    law.p0 = mu * (1.0 - decay) / denom;
    law.ratio = lambda * (1.0 - decay) / denom;
  } else {
    const double grow = std::exp(theta * t);  // <= 1
    const double denom = lambda * grow - mu;
    law.p0 = mu * (grow - 1.0) / denom;
    law.ratio = lambda * (grow - 1.0) / denom;
  }
  law.first = (1.0 - law.p0) * (1.0 - law.ratio);
  return law;
}

}  // namespace

double bd_pmf(double lambda, double mu, double t, int k) {
  const BdLaw law = bd_law(lambda, mu, t);
  if (k < 0) return 0.0;
  if (k == 0) return law.p0;
  return law.first * std::pow(law.ratio, k - 1);
}

double bd_difference_pmf(double lambda1, double mu1, double lambda2,
                         double mu2, double t, int k) {
  const BdLaw l1 = bd_law(lambda1, mu1, t);
  const BdLaw l2 = bd_law(lambda2, mu2, t);
  const double r = l1.ratio * l2.ratio;
  if (k == 0) return l1.p0 * l2.p0 + l1.first * l2.first / (1.0 - r);
  const BdLaw& big = k > 0 ? l1 : l2;    // the component carrying |k|
  const BdLaw& small = k > 0 ? l2 : l1;  // the one summed over
  const int a = std::abs(k);
  const double p_at = big.first * std::pow(big.ratio, a - 1);
  return p_at * (small.p0 + big.ratio * small.first / (1.0 - r));
}

}  // namespace ptproc::bdm
