#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ptproc/ratefn.hpp"

using ptproc::RateFunction;

namespace {

/* Reference integral independent of cumulative(): composite Simpson on
 * value(), applied separately between knots so discontinuities and kinks
 * never sit inside a panel. */
double simpson(const RateFunction& f, double a, double b, int n = 2000) {
  std::vector<double> cuts = {a};
  for (double k : f.knots_between(a, b)) cuts.push_back(k);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double lo = cuts[seg], hi = cuts[seg + 1];
    const double h = (hi - lo) / n;
    // value() is right-continuous; sample the right end just inside the
    // segment so a jump knot at hi contributes its left limit.
    double s = f.value(lo) + f.value(hi - 1e-9 * h);
    for (int i = 1; i < n; ++i)
      s += (i % 2 ? 4.0 : 2.0) * f.value(lo + i * h);
    total += s * h / 3.0;
  }
  return total;
}

}  // namespace

TEST_SUITE("ratefn") {
  TEST_CASE("constant basics") {
    const auto f = RateFunction::constant(2.5);
    CHECK(f.kind() == RateFunction::Kind::Constant);
    CHECK(f.value(0.0) == 2.5);
    CHECK(f.value(17.3) == 2.5);
    CHECK(f.cumulative(2.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(f.cumulative(1.0, 4.0) == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(f.sup_on(0.0, 9.0) == 2.5);
    CHECK_THROWS_AS(RateFunction::constant(-1.0), std::invalid_argument);
  }

  TEST_CASE("piecewise step function") {
    const auto f = RateFunction::piecewise({0.0, 1.0, 2.5}, {1.0, 3.0, 0.5});
    SUBCASE("right continuity at breakpoints") {
      CHECK(f.value(0.999999) == 1.0);
      CHECK(f.value(1.0) == 3.0);
      CHECK(f.value(2.5) == 0.5);
      CHECK(f.value(100.0) == 0.5);
    }
    SUBCASE("cumulative is the exact segment sum") {
      CHECK(f.cumulative(0.5) == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(f.cumulative(2.0) == doctest::Approx(1.0 + 3.0).epsilon(1e-15));
      CHECK(f.cumulative(3.0) ==
            doctest::Approx(1.0 + 4.5 + 0.25).epsilon(1e-15));
      CHECK(f.cumulative(1.5, 2.7) ==
            doctest::Approx(3.0 * 1.0 + 0.5 * 0.2).epsilon(1e-14));
    }
    SUBCASE("sup over windows") {
      CHECK(f.sup_on(0.0, 0.5) == 1.0);
      CHECK(f.sup_on(0.0, 1.5) == 3.0);
      CHECK(f.sup_on(2.6, 9.0) == 0.5);
    }
    SUBCASE("validation") {
      CHECK_THROWS_AS(RateFunction::piecewise({0.5, 1.0}, {1.0, 2.0}),
                      std::invalid_argument);  // must start at 0
      CHECK_THROWS_AS(RateFunction::piecewise({0.0, 1.0, 1.0}, {1.0, 2.0, 3.0}),
                      std::invalid_argument);  // strictly increasing
      CHECK_THROWS_AS(RateFunction::piecewise({0.0, 1.0}, {1.0, -2.0}),
                      std::invalid_argument);  // non-negative
    }
  }

  TEST_CASE("tabulated linear interpolation") {
    const auto f = RateFunction::tabulated({0.5, 1.5, 3.0}, {2.0, 4.0, 1.0});
    CHECK(f.value(0.0) == 2.0);   // clamped left
    CHECK(f.value(10.0) == 1.0);  // clamped right
    CHECK(f.value(1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(f.value(2.25) == doctest::Approx(2.5).epsilon(1e-15));
    // Exact trapezoids: 0.5*2 + (2+4)/2*1 + (4+1)/2*1.5 + 1*1
    CHECK(f.cumulative(5.0) ==
          doctest::Approx(1.0 + 3.0 + 3.75 + 2.0).epsilon(1e-14));
    CHECK(f.sup_on(0.0, 5.0) == 4.0);
    CHECK(f.sup_on(2.0, 5.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(RateFunction::tabulated({0.0}, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(RateFunction::tabulated({1.0, 0.5}, {1.0, 1.0}),
                    std::invalid_argument);
  }

  TEST_CASE("algebra folds to public kinds when exact") {
    const auto c = RateFunction::constant(2.0);
    const auto s1 = RateFunction::piecewise({0.0, 1.0}, {1.0, 2.0});
    const auto s2 = RateFunction::piecewise({0.0, 0.5}, {3.0, 1.0});
    const auto t1 = RateFunction::tabulated({0.0, 2.0}, {0.0, 4.0});

    CHECK((c + c).kind() == RateFunction::Kind::Constant);
    CHECK((c * c).constant_value() == 4.0);
    CHECK((s1 + s2).kind() == RateFunction::Kind::Piecewise);
    CHECK((s1 * s2).kind() == RateFunction::Kind::Piecewise);
    CHECK((c + t1).kind() == RateFunction::Kind::Tabulated);
    CHECK((c * t1).kind() == RateFunction::Kind::Tabulated);
    CHECK((t1 + t1).kind() == RateFunction::Kind::Tabulated);

    for (double x : {0.0, 0.3, 0.5, 0.9, 1.0, 1.7, 2.4}) {
      CHECK((s1 + s2).value(x) ==
            doctest::Approx(s1.value(x) + s2.value(x)).epsilon(1e-15));
      CHECK((s1 * s2).value(x) ==
            doctest::Approx(s1.value(x) * s2.value(x)).epsilon(1e-15));
      CHECK((c * t1).value(x) ==
            doctest::Approx(2.0 * t1.value(x)).epsilon(1e-15));
      CHECK((t1 + t1).value(x) ==
            doctest::Approx(2.0 * t1.value(x)).epsilon(1e-15));
    }

    SUBCASE("zero and identity elimination") {
      const auto zero = RateFunction::constant(0.0);
      CHECK((zero + t1).kind() == RateFunction::Kind::Tabulated);
      CHECK((zero * t1).is_zero());
      CHECK((RateFunction::constant(1.0) * s1).kind() ==
            RateFunction::Kind::Piecewise);
    }
  }

  TEST_CASE("composite nodes: exact integration, bounded sup") {
    // t on [0,1] (tabulated) times itself: t^2, integral over [0,1] = 1/3.
    const auto ramp = RateFunction::tabulated({0.0, 1.0}, {0.0, 1.0});
    const auto sq = ramp * ramp;
    CHECK(sq.kind() == RateFunction::Kind::Product);
    CHECK(sq.cumulative(0.0, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(sq.cumulative(0.2, 0.8) ==
          doctest::Approx((0.512 - 0.008) / 3).epsilon(1e-14));

    const auto step = RateFunction::piecewise({0.0, 0.6}, {2.0, 0.5});
    const auto mix = step * ramp + RateFunction::constant(0.3) * ramp;
    for (double a : {0.0, 0.3, 0.55})
      for (double b : {0.61, 1.3, 2.0}) {
        CHECK(mix.cumulative(a, b) ==
              doctest::Approx(simpson(mix, a, b)).epsilon(1e-9));
        // additivity (exact Gauss rules, so down at rounding level)
        const double m = 0.5 * (a + b);
        CHECK(mix.cumulative(a, m) + mix.cumulative(m, b) ==
              doctest::Approx(mix.cumulative(a, b)).epsilon(1e-14));
      }
    // sup bound dominates the function everywhere.
    for (double a : {0.0, 0.5}) {
      const double s = mix.sup_on(a, a + 0.7);
      for (int i = 0; i <= 50; ++i)
        CHECK(mix.value(a + 0.7 * i / 50.0) <= s + 1e-12);
    }
  }

  TEST_CASE("knots are sorted, unique, interior") {
    const auto step = RateFunction::piecewise({0.0, 0.6, 1.4}, {1.0, 2.0, 0.5});
    const auto tab = RateFunction::tabulated({0.2, 0.6, 2.0}, {1.0, 0.0, 3.0});
    const auto both = step * tab;
    const auto ks = both.knots_between(0.1, 1.9);
    std::vector<double> expect = {0.2, 0.6, 1.4};
    CHECK(ks == expect);
    CHECK(both.knots_between(1.45, 1.9).empty());
  }

  TEST_CASE("degenerate single-segment piecewise folds to constant") {
    const auto f = RateFunction::piecewise({0.0}, {1.5});
    CHECK(f.kind() == RateFunction::Kind::Constant);
    CHECK(f.constant_value() == 1.5);
  }
}
