#include "ptproc/interact.hpp"

#include <cmath>
#include <stdexcept>

namespace ptproc::interact {

JumpMenu jump_menu(const InteractingSkellamSpec& s) {
  JumpMenu m;
  m.jumps = {{{1, 1},
              {-1, -1},
              {1, -1},
              {-1, 1},
              {1, 0},
              {0, 1},
              {-1, 0},
              {0, -1}}};
  m.rates[0] = s.lambda1 * s.lambda2;
  m.rates[1] = s.mu1 * s.mu2;
  m.rates[2] = s.lambda1 * s.mu2 + s.eta21;
  m.rates[3] = s.mu1 * s.lambda2 + s.eta12;
  m.rates[4] = s.lambda1 * s.delta2;
  m.rates[5] = s.delta1 * s.lambda2;
  m.rates[6] = s.mu1 * s.delta2;
  m.rates[7] = s.delta1 * s.mu2;
  return m;
}

RateFunction event_rate(const InteractingSkellamSpec& spec) {
  JumpMenu m = jump_menu(spec);
  RateFunction total = RateFunction::constant(0.0);
  for (const auto& r : m.rates) total = total + r;
  return total;
}

Decomposition decompose(const InteractingSkellamSpec& s) {
  Decomposition d;
  d.s1 = {s.lambda1 * s.delta2, s.mu1 * s.delta2, s.n1};
  d.s2 = {s.delta1 * s.lambda2, s.delta1 * s.mu2, s.n2};
  d.s3 = {s.lambda1 * s.lambda2, s.mu1 * s.mu2, 0};
  d.s4 = {s.lambda1 * s.mu2 + s.eta21, s.mu1 * s.lambda2 + s.eta12, 0};
  return d;
}

std::pair<skellam::NhSkellamSpec, skellam::NhSkellamSpec> marginal_rates(
    const InteractingSkellamSpec& s) {
  RateFunction other1 = s.lambda2 + s.mu2 + s.delta2;
  RateFunction other2 = s.lambda1 + s.mu1 + s.delta1;
  skellam::NhSkellamSpec m1{s.lambda1 * other1 + s.eta21,
                            s.mu1 * other1 + s.eta12, s.n1};
  skellam::NhSkellamSpec m2{s.lambda2 * other2 + s.eta12,
                            s.mu2 * other2 + s.eta21, s.n2};
  return {m1, m2};
}

namespace {

/* Powers u^i v^j of the eight menu jumps, shared by both PGF routines. */
double jump_weight(std::array<int, 2> j, double u, double v) {
  return std::pow(u, j[0]) * std::pow(v, j[1]);
}

double pgf_exponent(const InteractingSkellamSpec& spec, double s, double t,
                    double u, double v) {
  JumpMenu m = jump_menu(spec);
  double expo = 0.0;
  for (int i = 0; i < 8; ++i)
    expo -= m.rates[i].cumulative(s, t) * (1.0 - jump_weight(m.jumps[i], u, v));
  return expo;
}

}  // namespace

double joint_pgf(const InteractingSkellamSpec& spec, double t, double u,
                 double v) {
  if (!(u > 0.0) || !(v > 0.0))
    throw std::invalid_argument("joint_pgf requires u, v > 0");
  return std::pow(u, spec.n1) * std::pow(v, spec.n2) *
         std::exp(pgf_exponent(spec, 0.0, t, u, v));
}

double increment_pgf(const InteractingSkellamSpec& spec, double s, double t,
                     double u, double v) {
  if (!(u > 0.0) || !(v > 0.0))
    throw std::invalid_argument("increment_pgf requires u, v > 0");
  if (!(s <= t)) throw std::invalid_argument("increment_pgf requires s <= t");
  return std::exp(pgf_exponent(spec, s, t, u, v));
}

double joint_pmf(const InteractingSkellamSpec& spec, double t, int m, int n) {
  Table2 tab = joint_table(spec, t, {m, n}, {m, n});
  return tab.prob({m, n});
}

Table2 joint_table(const InteractingSkellamSpec& spec, double t,
                   std::array<int, 2> lo, std::array<int, 2> hi, double tail) {
  Decomposition d = decompose(spec);
  Table1 p1 = skellam::skellam_table(d.s1, t, tail);
  Table1 p2 = skellam::skellam_table(d.s2, t, tail);
  Table1 p3 = skellam::skellam_table(d.s3, t, tail);
  Table1 p4 = skellam::skellam_table(d.s4, t, tail);
  Table2 out = Table2::box(lo, hi);
  // N1 = S1 + S3 + S4, N2 = S2 + S3 - S4. For target (m, n) and component
  // values (h, k) of (S1, S2), parity of (m-h) + (n-k) must be even and then
  // s3 = (m-h+n-k)/2, s4 = (m-h-n+k)/2 are determined.
  for (int m2 = lo[0]; m2 <= hi[0]; ++m2) {
    for (int n2 = lo[1]; n2 <= hi[1]; ++n2) {
      double acc = 0.0;
      for (int h = p1.lo[0]; h < p1.lo[0] + p1.extent[0]; ++h) {
        double ph = p1.p[static_cast<std::size_t>(h - p1.lo[0])];
        if (ph == 0.0) continue;
        for (int k = p2.lo[0]; k < p2.lo[0] + p2.extent[0]; ++k) {
          int d1 = m2 - h, d2 = n2 - k;
          if (((d1 + d2) & 1) != 0) continue;
          int s3 = (d1 + d2) / 2;
          int s4 = (d1 - d2) / 2;
          acc += ph * p2.p[static_cast<std::size_t>(k - p2.lo[0])] *
                 p3.prob({s3}) * p4.prob({s4});
        }
      }
      out.at({m2, n2}) = acc;
    }
  }
  // Neglected mass: the component tails plus whatever the caller's box does
  // not cover (the latter is 1 - total up to the former).
  out.truncation_bound = p1.truncation_bound + p2.truncation_bound +
                         p3.truncation_bound + p4.truncation_bound +
                         std::max(0.0, 1.0 - out.total());
  return out;
}

double covariance(const InteractingSkellamSpec& s, double u, double t) {
  double w = std::min(u, t);
  // integral of (lambda1-mu1)(lambda2-mu2) - eta12 - eta21 over [0, min(u,t)]
  return (s.lambda1 * s.lambda2).cumulative(w) -
         (s.lambda1 * s.mu2).cumulative(w) -
         (s.mu1 * s.lambda2).cumulative(w) + (s.mu1 * s.mu2).cumulative(w) -
         s.eta12.cumulative(w) - s.eta21.cumulative(w);
}

SamplePath<2> sample_direct(const InteractingSkellamSpec& spec, double horizon,
                            Rng& rng) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be finite and >= 0");
  SamplePath<2> path;
  path.initial = {spec.n1, spec.n2};
  path.horizon = horizon;
  if (horizon == 0.0) return path;
  JumpMenu menu = jump_menu(spec);
  RateFunction total = event_rate(spec);
  std::vector<double> cuts = total.knots_between(0.0, horizon);
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(horizon);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double maj = total.sup_on(a, b);
    if (maj <= 0.0) continue;
    double s = a;
    for (;;) {
      s += rng.exponential(maj);
      if (s >= b) break;
      // One uniform: below the stacked rates it selects the type, above the
      // total it is a thinning rejection.
      double x = rng.uniform() * maj;
      double c = 0.0;
      for (int j = 0; j < 8; ++j) {
        c += menu.rates[j].value(s);
        if (x < c) {
          path.events.push_back({s, menu.jumps[j]});
          break;
        }
      }
    }
  }
  return path;
}

SamplePath<2> sample_decomposed(const InteractingSkellamSpec& spec,
                                double horizon, Rng& rng) {
  Decomposition d = decompose(spec);
  // Component initials are part of the path initial state here.
  skellam::NhSkellamSpec c1{d.s1.rate_up, d.s1.rate_down, 0};
  skellam::NhSkellamSpec c2{d.s2.rate_up, d.s2.rate_down, 0};
  SamplePath<1> s1 = skellam::sample_skellam(c1, horizon, rng);
  SamplePath<1> s2 = skellam::sample_skellam(c2, horizon, rng);
  SamplePath<1> s3 = skellam::sample_skellam(d.s3, horizon, rng);
  SamplePath<1> s4 = skellam::sample_skellam(d.s4, horizon, rng);
  SamplePath<2> path;
  path.initial = {spec.n1, spec.n2};
  path.horizon = horizon;
  auto push = [&](const SamplePath<1>& src, int w1, int w2) {
    for (const auto& e : src.events)
      path.events.push_back({e.time, {e.jump[0] * w1, e.jump[0] * w2}});
  };
  push(s1, 1, 0);
  push(s2, 0, 1);
  push(s3, 1, 1);
  push(s4, 1, -1);
  std::sort(path.events.begin(), path.events.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
  return path;
}

CompoundRepresentation compound_representation(
    const InteractingSkellamSpec& spec) {
  JumpMenu menu = jump_menu(spec);
  CompoundRepresentation rep;
  rep.jumps = menu.jumps;
  double total = 0.0;
  std::array<double, 8> r{};
  for (int i = 0; i < 8; ++i) {
    if (!menu.rates[i].is_constant())
      throw std::invalid_argument(
          "compound representation needs constant rates");
    r[i] = menu.rates[i].constant_value();
    total += r[i];
  }
  if (total <= 0.0)
    throw std::invalid_argument(
        "compound representation undefined for an identically zero menu");
  rep.rate = total;
  for (int i = 0; i < 8; ++i) rep.probs[i] = r[i] / total;
  return rep;
}

skellam::GeneralizedSkellamSpec linear_combination(
    const InteractingSkellamSpec& spec, int a, int b) {
  if (a == 0 && b == 0)
    throw std::invalid_argument("linear_combination requires (a,b) != (0,0)");
  Decomposition d = decompose(spec);
  std::map<int, RateFunction> rates;
  auto add = [&](int jump, const RateFunction& r) {
    if (jump == 0 || r.is_zero()) return;
    auto it = rates.find(jump);
    if (it == rates.end())
      rates.emplace(jump, r);
    else
      it->second = it->second + r;
  };
  add(a, d.s1.rate_up);
  add(-a, d.s1.rate_down);
  add(b, d.s2.rate_up);
  add(-b, d.s2.rate_down);
  add(a + b, d.s3.rate_up);
  add(-(a + b), d.s3.rate_down);
  add(a - b, d.s4.rate_up);
  add(-(a - b), d.s4.rate_down);
  skellam::GeneralizedSkellamSpec out;
  out.rates = std::move(rates);
  out.validate();
  return out;
}

void GeneralizedInteractSpec::validate() const {
  if (group1.count(0) || group2.count(0))
    throw std::invalid_argument("group jump menus must not contain 0");
  for (const auto& [h, r] : migration12) {
    (void)r;
    if (h < 1)
      throw std::invalid_argument("migration menu entries must be >= 1");
  }
  for (const auto& [k, r] : migration21) {
    (void)r;
    if (k < 1)
      throw std::invalid_argument("migration menu entries must be >= 1");
  }
}

std::pair<std::vector<PoissonTerm>, std::vector<PoissonTerm>>
generalized_marginals(const GeneralizedInteractSpec& spec) {
  spec.validate();
  std::vector<PoissonTerm> m1, m2;
  // Group 1 acts alone (group 2 idle), and jointly with every group-2 jump.
  for (const auto& [h, lh] : spec.group1) {
    m1.push_back({h, lh * spec.delta2});
    for (const auto& [k, lk] : spec.group2) {
      (void)k;
      m1.push_back({h, lh * lk});
    }
  }
  for (const auto& [k, lk] : spec.group2) {
    m2.push_back({k, spec.delta1 * lk});
    for (const auto& [h, lh] : spec.group1) {
      (void)h;
      m2.push_back({k, lh * lk});
    }
  }
  // Migration: group 1 forwards h units to group 2, and vice versa.
  for (const auto& [h, r] : spec.migration12) {
    m1.push_back({-h, r});
    m2.push_back({h, r});
  }
  for (const auto& [k, r] : spec.migration21) {
    m1.push_back({k, r});
    m2.push_back({-k, r});
  }
  return {std::move(m1), std::move(m2)};
}

skellam::GeneralizedSkellamSpec merge_terms(
    const std::vector<PoissonTerm>& terms) {
  skellam::GeneralizedSkellamSpec out;
  for (const auto& term : terms) {
    if (term.rate.is_zero()) continue;
    auto it = out.rates.find(term.jump);
    if (it == out.rates.end())
      out.rates.emplace(term.jump, term.rate);
    else
      it->second = it->second + term.rate;
  }
  out.validate();
  return out;
}

std::vector<TrivariateComponent> trivariate_decompose(
    const TrivariateSpec& spec) {
  auto factor = [&](int g, int sign) -> const RateFunction& {
    if (sign > 0) return spec.lambda[static_cast<std::size_t>(g)];
    if (sign < 0) return spec.mu[static_cast<std::size_t>(g)];
    return spec.delta[static_cast<std::size_t>(g)];
  };
  // Rate of the jump with sign vector s: the product of per-group factors,
  // plus one migration term for each donor/recipient pair (i gives to j when
  // s_i = -1 and s_j = +1), the third group contributing its own factor.
  auto rate_of = [&](std::array<int, 3> s) {
    RateFunction r = factor(0, s[0]) * factor(1, s[1]) * factor(2, s[2]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j || s[i] != -1 || s[j] != 1) continue;
        int third = 3 - i - j;
        r = r + spec.eta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                    factor(third, s[static_cast<std::size_t>(third)]);
      }
    }
    return r;
  };
  std::vector<TrivariateComponent> out;
  for (int a = 1; a >= -1; --a) {
    for (int b = 1; b >= -1; --b) {
      for (int c = 1; c >= -1; --c) {
        std::array<int, 3> s{a, b, c};
        int first = s[0] != 0 ? s[0] : (s[1] != 0 ? s[1] : s[2]);
        if (first != 1) continue;  // canonical representative only
        TrivariateComponent comp;
        comp.signs = s;
        comp.up = rate_of(s);
        comp.down = rate_of({-a, -b, -c});
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

}  // namespace ptproc::interact
