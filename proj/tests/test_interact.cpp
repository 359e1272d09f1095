#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "ptproc/interact.hpp"
#include "ptproc/mc.hpp"
#include "ptproc/oracle.hpp"

using namespace ptproc;
namespace it = ptproc::interact;

namespace {

/* Constant-rate reference spec used across cases. */
it::InteractingSkellamSpec constant_spec() {
  it::InteractingSkellamSpec s;
  s.lambda1 = RateFunction::constant(0.7);
  s.mu1 = RateFunction::constant(0.4);
  s.delta1 = RateFunction::constant(0.6);
  s.lambda2 = RateFunction::constant(0.5);
  s.mu2 = RateFunction::constant(0.3);
  s.delta2 = RateFunction::constant(0.8);
  s.eta12 = RateFunction::constant(0.25);
  s.eta21 = RateFunction::constant(0.15);
  s.n1 = 1;
  s.n2 = 2;
  return s;
}

/* Time-varying spec exercising piecewise/tabulated rates. */
it::InteractingSkellamSpec varying_spec() {
  it::InteractingSkellamSpec s;
  s.lambda1 = RateFunction::piecewise({0.0, 0.6}, {0.4, 0.9});
  s.mu1 = RateFunction::constant(0.5);
  s.delta1 = RateFunction::constant(0.7);
  s.lambda2 = RateFunction::tabulated({0.0, 1.0}, {0.8, 0.4});
  s.mu2 = RateFunction::constant(0.3);
  s.delta2 = RateFunction::constant(0.6);
  s.eta12 = RateFunction::constant(0.2);
  s.eta21 = RateFunction::tabulated({0.0, 1.0}, {0.35, 0.05});
  s.n1 = 1;
  s.n2 = 0;
  return s;
}

double skellam_pgf_at(const skellam::NhSkellamSpec& s, double t, double u) {
  return skellam::skellam_pgf(s, t, u);
}

}  // namespace

TEST_SUITE("interact") {
  TEST_CASE("jump menu: fixed order, product-plus-migration rates") {
    const auto spec = constant_spec();
    const auto menu = it::jump_menu(spec);
    const std::array<std::array<int, 2>, 8> order = {{{1, 1},
                                                      {-1, -1},
                                                      {1, -1},
                                                      {-1, 1},
                                                      {1, 0},
                                                      {0, 1},
                                                      {-1, 0},
                                                      {0, -1}}};
    CHECK(menu.jumps == order);
    const double l1 = 0.7, m1 = 0.4, d1 = 0.6, l2 = 0.5, m2 = 0.3, d2 = 0.8;
    const double e12 = 0.25, e21 = 0.15;
    const double expect[8] = {l1 * l2,           m1 * m2,
                              l1 * m2 + e21,     m1 * l2 + e12,
                              l1 * d2,           d1 * l2,
                              m1 * d2,           d1 * m2};
    double total = 0.0;
    for (int i = 0; i < 8; ++i) {
      CHECK(menu.rates[i].constant_value() ==
            doctest::Approx(expect[i]).epsilon(1e-15));
      total += expect[i];
    }
    CHECK(it::event_rate(spec).constant_value() ==
          doctest::Approx(total).epsilon(1e-14));
  }

  TEST_CASE("decomposition components carry the documented rates") {
    const auto spec = varying_spec();
    const auto d = it::decompose(spec);
    CHECK(d.s1.initial == spec.n1);
    CHECK(d.s2.initial == spec.n2);
    CHECK(d.s3.initial == 0);
    CHECK(d.s4.initial == 0);
    for (double t : {0.0, 0.3, 0.7, 1.4}) {
      const double l1 = spec.lambda1.value(t), m1 = spec.mu1.value(t),
                   dd1 = spec.delta1.value(t), l2 = spec.lambda2.value(t),
                   m2 = spec.mu2.value(t), dd2 = spec.delta2.value(t);
      CHECK(d.s1.rate_up.value(t) == doctest::Approx(l1 * dd2).epsilon(1e-15));
      CHECK(d.s1.rate_down.value(t) == doctest::Approx(m1 * dd2).epsilon(1e-15));
      CHECK(d.s2.rate_up.value(t) == doctest::Approx(dd1 * l2).epsilon(1e-15));
      CHECK(d.s2.rate_down.value(t) == doctest::Approx(dd1 * m2).epsilon(1e-15));
      CHECK(d.s3.rate_up.value(t) == doctest::Approx(l1 * l2).epsilon(1e-15));
      CHECK(d.s3.rate_down.value(t) == doctest::Approx(m1 * m2).epsilon(1e-15));
      CHECK(d.s4.rate_up.value(t) ==
            doctest::Approx(l1 * m2 + spec.eta21.value(t)).epsilon(1e-15));
      CHECK(d.s4.rate_down.value(t) ==
            doctest::Approx(m1 * l2 + spec.eta12.value(t)).epsilon(1e-15));
    }
  }

  TEST_CASE("joint pgf factorizes over the decomposition") {
    for (const auto& spec : {constant_spec(), varying_spec()}) {
      const auto d = it::decompose(spec);
      for (double t : {0.2, 0.8, 1.5})
        for (auto [u, v] : std::vector<std::pair<double, double>>{
                 {0.4, 0.7}, {1.3, 0.6}, {0.9, 1.8}, {1.0, 1.0}}) {
          const double product = skellam_pgf_at(d.s1, t, u) *
                                 skellam_pgf_at(d.s2, t, v) *
                                 skellam_pgf_at(d.s3, t, u * v) *
                                 skellam_pgf_at(d.s4, t, u / v);
          CHECK(it::joint_pgf(spec, t, u, v) ==
                doctest::Approx(product).epsilon(1e-13));
        }
    }
  }

  TEST_CASE("marginals: rate algebra and pgf consistency") {
    const auto spec = varying_spec();
    const auto [mg1, mg2] = it::marginal_rates(spec);
    CHECK(mg1.initial == spec.n1);
    CHECK(mg2.initial == spec.n2);
    for (double t : {0.0, 0.5, 1.2}) {
      const double pace2 = spec.lambda2.value(t) + spec.mu2.value(t) +
                           spec.delta2.value(t);
      const double pace1 = spec.lambda1.value(t) + spec.mu1.value(t) +
                           spec.delta1.value(t);
      CHECK(mg1.rate_up.value(t) ==
            doctest::Approx(spec.lambda1.value(t) * pace2 +
                            spec.eta21.value(t))
                .epsilon(1e-14));
      CHECK(mg1.rate_down.value(t) ==
            doctest::Approx(spec.mu1.value(t) * pace2 + spec.eta12.value(t))
                .epsilon(1e-14));
      CHECK(mg2.rate_up.value(t) ==
            doctest::Approx(spec.lambda2.value(t) * pace1 +
                            spec.eta12.value(t))
                .epsilon(1e-14));
      CHECK(mg2.rate_down.value(t) ==
            doctest::Approx(spec.mu2.value(t) * pace1 + spec.eta21.value(t))
                .epsilon(1e-14));
    }
    // Setting v = 1 (resp. u = 1) in the joint pgf yields the marginal pgf.
    for (double t : {0.4, 1.1})
      for (double u : {0.5, 1.4}) {
        CHECK(it::joint_pgf(spec, t, u, 1.0) ==
              doctest::Approx(skellam_pgf_at(mg1, t, u)).epsilon(1e-13));
        CHECK(it::joint_pgf(spec, t, 1.0, u) ==
              doctest::Approx(skellam_pgf_at(mg2, t, u)).epsilon(1e-13));
      }
  }

  TEST_CASE("increment pgf: ratio property and stationarity of increments") {
    const auto spec = varying_spec();
    const double s = 0.4, t = 1.2, u = 0.8, v = 1.3;
    CHECK(it::increment_pgf(spec, s, t, u, v) ==
          doctest::Approx(it::joint_pgf(spec, t, u, v) /
                          it::joint_pgf(spec, s, u, v))
              .epsilon(1e-13));
    // Over (0, t] the increment pgf is the joint pgf without the initial
    // offset.
    auto zero_init = spec;
    zero_init.n1 = zero_init.n2 = 0;
    CHECK(it::increment_pgf(spec, 0.0, t, u, v) ==
          doctest::Approx(it::joint_pgf(zero_init, t, u, v)).epsilon(1e-13));
  }

  TEST_CASE("joint pmf against the Poisson superposition oracle") {
    const auto spec = varying_spec();
    const double t = 0.8;
    const auto menu = it::jump_menu(spec);
    std::vector<std::array<int, 2>> jumps(menu.jumps.begin(),
                                          menu.jumps.end());
    std::vector<double> means;
    for (const auto& r : menu.rates) means.push_back(r.cumulative(t));
    const std::array<int, 2> lo{-5, -6}, hi{7, 6};
    const auto ref = oracle::poisson_convolution_pmf(
        jumps, means, {spec.n1, spec.n2}, lo, hi, 1e-15, 1e-2);
    double max_err = 0.0;
    for (std::size_t i = 0; i < ref.p.size(); ++i) {
      const auto s = ref.state_of(i);
      max_err = std::max(
          max_err, std::abs(ref.p[i] - it::joint_pmf(spec, t, s[0], s[1])));
    }
    CHECK(max_err < 1e-10);

    const auto table = it::joint_table(spec, t, lo, hi, 1e-12);
    for (std::size_t i = 0; i < table.p.size(); ++i) {
      const auto s = table.state_of(i);
      CHECK(table.p[i] ==
            doctest::Approx(it::joint_pmf(spec, t, s[0], s[1]))
                .epsilon(1e-11));
    }
    // The declared truncation bound must cover the mass the box misses
    // (this narrow box misses about 1e-3) yet stay tight for a wide box.
    CHECK(table.total() + table.truncation_bound >= 1.0 - 1e-9);
    CHECK(table.truncation_bound >= 1.0 - table.total() - 1e-12);
    int lo1, hi1, lo2, hi2;
    const auto [mg1, mg2] = it::marginal_rates(spec);
    skellam::skellam_support(mg1, t, 1e-10, lo1, hi1);
    skellam::skellam_support(mg2, t, 1e-10, lo2, hi2);
    const auto wide =
        it::joint_table(spec, t, {lo1, lo2}, {hi1, hi2}, 1e-12);
    CHECK(wide.truncation_bound <= 1e-8);
  }

  TEST_CASE("covariance: decomposition identity and time monotonicity") {
    for (const auto& spec : {constant_spec(), varying_spec()}) {
      const auto d = it::decompose(spec);
      for (double s : {0.3, 0.9})
        for (double t : {0.3, 0.9, 1.6}) {
          const double m = std::min(s, t);
          // Independent components: Cov(N1, N2)(m) = Var S3(m) - Var S4(m).
          const double expect = d.s3.rate_up.cumulative(m) +
                                d.s3.rate_down.cumulative(m) -
                                d.s4.rate_up.cumulative(m) -
                                d.s4.rate_down.cumulative(m);
          CHECK(it::covariance(spec, s, t) ==
                doctest::Approx(expect).epsilon(1e-13));
          CHECK(it::covariance(spec, s, t) ==
                doctest::Approx(it::covariance(spec, m, m)).epsilon(1e-14));
        }
    }
  }

  TEST_CASE("compound representation for constant rates") {
    const auto spec = constant_spec();
    const auto rep = it::compound_representation(spec);
    const auto menu = it::jump_menu(spec);
    CHECK(rep.jumps == menu.jumps);
    double total = 0.0, psum = 0.0;
    for (int i = 0; i < 8; ++i) total += menu.rates[i].constant_value();
    CHECK(rep.rate == doctest::Approx(total).epsilon(1e-14));
    for (int i = 0; i < 8; ++i) {
      CHECK(rep.probs[i] ==
            doctest::Approx(menu.rates[i].constant_value() / total)
                .epsilon(1e-14));
      psum += rep.probs[i];
    }
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-14));

    // The compound form reconstructs the joint pgf.
    for (double t : {0.5, 1.2})
      for (auto [u, v] :
           std::vector<std::pair<double, double>>{{0.6, 1.2}, {1.5, 0.8}}) {
        double mean_jump_pgf = 0.0;
        for (int i = 0; i < 8; ++i)
          mean_jump_pgf += rep.probs[i] * std::pow(u, rep.jumps[i][0]) *
                           std::pow(v, rep.jumps[i][1]);
        const double compound =
            std::pow(u, spec.n1) * std::pow(v, spec.n2) *
            std::exp(rep.rate * t * (mean_jump_pgf - 1.0));
        CHECK(it::joint_pgf(spec, t, u, v) ==
              doctest::Approx(compound).epsilon(1e-13));
      }

    CHECK_THROWS_AS(it::compound_representation(varying_spec()),
                    std::invalid_argument);
  }

  TEST_CASE("linear combinations transform the pgf correctly") {
    const auto spec = varying_spec();
    const double t = 0.9;
    for (auto [a, b] : std::vector<std::pair<int, int>>{
             {1, 1}, {1, -1}, {2, 3}, {0, 1}, {-2, 1}}) {
      const auto lc = it::linear_combination(spec, a, b);
      for (double u : {0.6, 0.9, 1.2}) {
        const double lhs = skellam::generalized_pgf(lc, t, u) *
                           std::pow(u, a * spec.n1 + b * spec.n2);
        const double rhs =
            it::joint_pgf(spec, t, std::pow(u, a), std::pow(u, b));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
    CHECK_THROWS_AS(it::linear_combination(spec, 0, 0), std::invalid_argument);
  }

  TEST_CASE("two samplers, one law") {
    const auto spec = varying_spec();
    const double horizon = 0.8;
    using Block = testutil::HistBlock<2>;
    const std::uint64_t n = 30000;
    auto direct = mc::run_replicates<Block>(
        n, 4401u,
        [&](Block& acc, std::uint64_t rep, Rng& rng) {
          auto path = it::sample_direct(spec, horizon, rng);
          if (rep < 32) path.check_valid();
          acc.add(path.endpoint());
        },
        2);
    auto decomposed = mc::run_replicates<Block>(
        n, 4402u,
        [&](Block& acc, std::uint64_t rep, Rng& rng) {
          auto path = it::sample_decomposed(spec, horizon, rng);
          if (rep < 32) path.check_valid();
          acc.add(path.endpoint());
        },
        2);

    // Common cell list over the union of observed states.
    std::map<std::array<int, 2>, std::pair<std::uint64_t, std::uint64_t>> both;
    for (const auto& [s, c] : direct.counts) both[s].first = c;
    for (const auto& [s, c] : decomposed.counts) both[s].second = c;
    std::vector<std::uint64_t> va, vb;
    for (const auto& [s, cc] : both) {
      va.push_back(cc.first);
      vb.push_back(cc.second);
    }
    const auto two = stats::chi_square_two_sample(va, vb);
    CHECK(two.p_value > 1e-3);

    // And each sampler against the closed-form law.
    const auto [mg1, mg2] = it::marginal_rates(spec);
    int lo1, hi1, lo2, hi2;
    skellam::skellam_support(mg1, horizon, 1e-10, lo1, hi1);
    skellam::skellam_support(mg2, horizon, 1e-10, lo2, hi2);
    const auto table =
        it::joint_table(spec, horizon, {lo1, lo2}, {hi1, hi2}, 1e-10);
    CHECK(testutil::gof_against_table(table, direct.counts, n).p_value > 1e-3);
    CHECK(testutil::gof_against_table(table, decomposed.counts, n).p_value >
          1e-3);
  }

  TEST_CASE("generalized model reduces to the basic one") {
    const auto basic = varying_spec();
    it::GeneralizedInteractSpec gen;
    gen.group1[1] = basic.lambda1;
    gen.group1[-1] = basic.mu1;
    gen.group2[1] = basic.lambda2;
    gen.group2[-1] = basic.mu2;
    gen.migration12[1] = basic.eta12;
    gen.migration21[1] = basic.eta21;
    gen.delta1 = basic.delta1;
    gen.delta2 = basic.delta2;
    const auto [t1, t2] = it::generalized_marginals(gen);
    const auto merged1 = it::merge_terms(t1);
    const auto merged2 = it::merge_terms(t2);
    const auto [mg1, mg2] = it::marginal_rates(basic);
    for (double t : {0.0, 0.45, 1.3}) {
      CHECK(merged1.rates.at(1).value(t) ==
            doctest::Approx(mg1.rate_up.value(t)).epsilon(1e-14));
      CHECK(merged1.rates.at(-1).value(t) ==
            doctest::Approx(mg1.rate_down.value(t)).epsilon(1e-14));
      CHECK(merged2.rates.at(1).value(t) ==
            doctest::Approx(mg2.rate_up.value(t)).epsilon(1e-14));
      CHECK(merged2.rates.at(-1).value(t) ==
            doctest::Approx(mg2.rate_down.value(t)).epsilon(1e-14));
    }

    // Multi-unit menus: jumps pass through with the documented products.
    it::GeneralizedInteractSpec multi;
    multi.group1[2] = RateFunction::constant(0.3);
    multi.group2[-3] = RateFunction::constant(0.2);
    multi.migration12[2] = RateFunction::constant(0.05);
    multi.delta1 = RateFunction::constant(0.4);
    multi.delta2 = RateFunction::constant(0.5);
    const auto [u1, u2] = it::generalized_marginals(multi);
    const auto g1 = it::merge_terms(u1);
    const auto g2 = it::merge_terms(u2);
    // N1: +2 at 0.3*(0.5 + 0.2) [group 2 idles or jumps], -2 at 0.05.
    CHECK(g1.rates.at(2).constant_value() ==
          doctest::Approx(0.3 * 0.7).epsilon(1e-15));
    CHECK(g1.rates.at(-2).constant_value() ==
          doctest::Approx(0.05).epsilon(1e-15));
    // N2: -3 at 0.2*(0.4 + 0.3), +2 at 0.05.
    CHECK(g2.rates.at(-3).constant_value() ==
          doctest::Approx(0.2 * 0.7).epsilon(1e-15));
    CHECK(g2.rates.at(2).constant_value() ==
          doctest::Approx(0.05).epsilon(1e-15));

    it::GeneralizedInteractSpec bad;
    bad.group1[0] = RateFunction::constant(1.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    it::GeneralizedInteractSpec bad2;
    bad2.migration12[0] = RateFunction::constant(1.0);
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
  }

  TEST_CASE("trivariate decomposition: structure and hand-checked rates") {
    it::TrivariateSpec spec;
    const double l[3] = {0.6, 0.4, 0.3}, m[3] = {0.2, 0.5, 0.35},
                 d[3] = {0.7, 0.8, 0.9};
    for (int g = 0; g < 3; ++g) {
      spec.lambda[g] = RateFunction::constant(l[g]);
      spec.mu[g] = RateFunction::constant(m[g]);
      spec.delta[g] = RateFunction::constant(d[g]);
    }
    const double e01 = 0.11, e02 = 0.07, e10 = 0.05, e12 = 0.13, e20 = 0.09,
                 e21 = 0.03;
    spec.eta[0][1] = RateFunction::constant(e01);
    spec.eta[0][2] = RateFunction::constant(e02);
    spec.eta[1][0] = RateFunction::constant(e10);
    spec.eta[1][2] = RateFunction::constant(e12);
    spec.eta[2][0] = RateFunction::constant(e20);
    spec.eta[2][1] = RateFunction::constant(e21);

    const auto comps = it::trivariate_decompose(spec);
    REQUIRE(comps.size() == 13);
    std::map<std::array<int, 3>, const it::TrivariateComponent*> by_sign;
    for (const auto& c : comps) {
      int first = 0;
      for (int g = 0; g < 3; ++g)
        if (c.signs[g] != 0) {
          first = c.signs[g];
          break;
        }
      CHECK(first == 1);
      CHECK(!by_sign.count(c.signs));
      by_sign[c.signs] = &c;
    }

    // Hand-computed entries: products of per-group factors plus migration
    // terms (donor sign -1, recipient sign +1, third group's factor).
    const auto& c111 = *by_sign.at({1, 1, 1});
    CHECK(c111.up.constant_value() ==
          doctest::Approx(l[0] * l[1] * l[2]).epsilon(1e-15));
    CHECK(c111.down.constant_value() ==
          doctest::Approx(m[0] * m[1] * m[2]).epsilon(1e-15));
    const auto& c1m0 = *by_sign.at({1, -1, 0});
    CHECK(c1m0.up.constant_value() ==
          doctest::Approx(l[0] * m[1] * d[2] + e10 * d[2]).epsilon(1e-15));
    CHECK(c1m0.down.constant_value() ==
          doctest::Approx(m[0] * l[1] * d[2] + e01 * d[2]).epsilon(1e-15));
    const auto& c10m = *by_sign.at({1, 0, -1});
    CHECK(c10m.up.constant_value() ==
          doctest::Approx(l[0] * d[1] * m[2] + e20 * d[1]).epsilon(1e-15));
    const auto& c1mm = *by_sign.at({1, -1, -1});
    CHECK(c1mm.up.constant_value() ==
          doctest::Approx(l[0] * m[1] * m[2] + e10 * m[2] + e20 * m[1])
              .epsilon(1e-15));
    const auto& c100 = *by_sign.at({1, 0, 0});
    CHECK(c100.up.constant_value() ==
          doctest::Approx(l[0] * d[1] * d[2]).epsilon(1e-15));

    // Group marginals assemble identically from components and from the
    // 26-vector direct menu.
    auto direct_rate = [&](std::array<int, 3> s) {
      auto fac = [&](int g, int sg) {
        return sg > 0 ? l[g] : (sg < 0 ? m[g] : d[g]);
      };
      double r = fac(0, s[0]) * fac(1, s[1]) * fac(2, s[2]);
      const double eta[3][3] = {{0, e01, e02}, {e10, 0, e12}, {e20, e21, 0}};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (i == j || s[i] != -1 || s[j] != 1) continue;
          const int third = 3 - i - j;
          r += eta[i][j] * fac(third, s[third]);
        }
      return r;
    };
    for (int g = 0; g < 3; ++g) {
      double from_menu = 0.0;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
          for (int c = -1; c <= 1; ++c) {
            const std::array<int, 3> s{a, b, c};
            if (s == std::array<int, 3>{0, 0, 0} || s[g] != 1) continue;
            from_menu += direct_rate(s);
          }
      double from_comps = 0.0;
      for (const auto& c : comps) {
        if (c.signs[g] == 1) from_comps += c.up.constant_value();
        if (c.signs[g] == -1) from_comps += c.down.constant_value();
      }
      CHECK(from_comps == doctest::Approx(from_menu).epsilon(1e-13));
    }
  }

  TEST_CASE("trivariate model: direct simulation matches the decomposition") {
    it::TrivariateSpec spec;
    const double l[3] = {0.5, 0.35, 0.35}, m[3] = {0.3, 0.45, 0.25},
                 d[3] = {0.8, 0.7, 0.9};
    for (int g = 0; g < 3; ++g) {
      spec.lambda[g] = RateFunction::constant(l[g]);
      spec.mu[g] = RateFunction::constant(m[g]);
      spec.delta[g] = RateFunction::constant(d[g]);
    }
    const double eta[3][3] = {
        {0.0, 0.12, 0.06}, {0.04, 0.0, 0.1}, {0.08, 0.02, 0.0}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) spec.eta[i][j] = RateFunction::constant(eta[i][j]);
    spec.initial = {1, 0, 2};
    const double horizon = 0.5;

    // Route A: Gillespie over the 26 nonzero sign vectors, rates rebuilt by
    // hand from the synchronous-epoch description.
    std::vector<std::array<int, 3>> menu;
    std::vector<double> rate;
    double total = 0.0;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          const std::array<int, 3> s{a, b, c};
          if (s == std::array<int, 3>{0, 0, 0}) continue;
          auto fac = [&](int g, int sg) {
            return sg > 0 ? l[g] : (sg < 0 ? m[g] : d[g]);
          };
          double r = fac(0, a) * fac(1, b) * fac(2, c);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
              if (i == j || s[i] != -1 || s[j] != 1) continue;
              r += eta[i][j] * fac(3 - i - j, s[3 - i - j]);
            }
          menu.push_back(s);
          rate.push_back(r);
          total += r;
        }

    using Block = testutil::HistBlock<3>;
    const std::uint64_t n = 25000;
    auto direct = mc::run_replicates<Block>(
        n, 990017u,
        [&](Block& acc, std::uint64_t, Rng& rng) {
          std::array<int, 3> x = spec.initial;
          double t = 0.0;
          for (;;) {
            t += rng.exponential(total);
            if (t > horizon) break;
            double pick = rng.uniform() * total;
            std::size_t idx = 0;
            while (idx + 1 < rate.size() && pick > rate[idx]) {
              pick -= rate[idx];
              ++idx;
            }
            for (int g = 0; g < 3; ++g) x[g] += menu[idx][g];
          }
          acc.add(x);
        },
        2);

    // Route B: superpose the 13 independent Skellam components.
    const auto comps = it::trivariate_decompose(spec);
    auto decomposed = mc::run_replicates<Block>(
        n, 990018u,
        [&](Block& acc, std::uint64_t, Rng& rng) {
          std::array<int, 3> x = spec.initial;
          for (const auto& c : comps) {
            skellam::NhSkellamSpec part;
            part.rate_up = c.up;
            part.rate_down = c.down;
            const int val =
                skellam::sample_skellam(part, horizon, rng).endpoint()[0];
            for (int g = 0; g < 3; ++g) x[g] += val * c.signs[g];
          }
          acc.add(x);
        },
        2);

    std::map<std::array<int, 3>, std::pair<std::uint64_t, std::uint64_t>> all;
    for (const auto& [s, c] : direct.counts) all[s].first = c;
    for (const auto& [s, c] : decomposed.counts) all[s].second = c;
    std::vector<std::uint64_t> va, vb;
    for (const auto& [s, cc] : all) {
      va.push_back(cc.first);
      vb.push_back(cc.second);
    }
    const auto two = stats::chi_square_two_sample(va, vb);
    CHECK(two.p_value > 1e-3);
  }
}
