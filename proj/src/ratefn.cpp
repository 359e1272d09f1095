#include "ptproc/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptproc {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_values(const std::vector<double>& v) {
  for (double x : v) {
    require(std::isfinite(x), "rate values must be finite");
    require(x >= 0.0, "rate values must be non-negative");
  }
}

/* Gauss-Legendre nodes/weights on [-1,1], orders 1..8, computed once by
 * Newton iteration on the Legendre recurrence. Order n is exact for
 * polynomials of degree 2n-1. */
struct GlRule {
  std::vector<double> x, w;
};

GlRule make_rule(int n) {
  GlRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GlRule& rule_for_degree(int deg) {
  static const std::vector<GlRule> rules = [] {
    std::vector<GlRule> v;
    for (int n = 1; n <= 8; ++n) v.push_back(make_rule(n));
    return v;
  }();
  int n = std::clamp(deg / 2 + 1, 1, 8);
  return rules[static_cast<std::size_t>(n - 1)];
}

}  // namespace

RateFunction RateFunction::constant(double c) {
  require(std::isfinite(c) && c >= 0.0, "constant rate must be >= 0");
  RateFunction f;
  f.kind_ = Kind::Constant;
  f.c_ = c;
  return f;
}

RateFunction RateFunction::piecewise(std::vector<double> breakpoints,
                                     std::vector<double> values) {
  require(!breakpoints.empty() && breakpoints.size() == values.size(),
          "piecewise rate needs matching breakpoints and values");
  require(breakpoints.front() == 0.0,
          "piecewise rate must start its first segment at 0");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    require(breakpoints[i] > breakpoints[i - 1],
            "piecewise breakpoints must be strictly increasing");
  check_values(values);
  if (values.size() == 1) return constant(values[0]);
  RateFunction f;
  f.kind_ = Kind::Piecewise;
  f.xs_ = std::move(breakpoints);
  f.ys_ = std::move(values);
  return f;
}

RateFunction RateFunction::tabulated(std::vector<double> grid,
                                     std::vector<double> values) {
  require(grid.size() >= 2 && grid.size() == values.size(),
          "tabulated rate needs a grid of at least two points");
  require(grid.front() >= 0.0, "tabulated grid must lie in [0, inf)");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1],
            "tabulated grid must be strictly increasing");
  check_values(values);
  RateFunction f;
  f.kind_ = Kind::Tabulated;
  f.xs_ = std::move(grid);
  f.ys_ = std::move(values);
  return f;
}

double RateFunction::constant_value() const {
  require(kind_ == Kind::Constant, "rate function is not constant");
  return c_;
}

double RateFunction::value(double t) const {
  require(t >= 0.0 && std::isfinite(t), "rate argument must be in [0, inf)");
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Piecewise: {
      // Right-continuous: value on [x_i, x_{i+1}).
      auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      return ys_[static_cast<std::size_t>(it - xs_.begin()) - 1];
    }
    case Kind::Tabulated: {
      if (t <= xs_.front()) return ys_.front();
      if (t >= xs_.back()) return ys_.back();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
      std::size_t i = static_cast<std::size_t>(it - xs_.begin());
      double w = (t - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& ch : children_) s += ch.value(t);
      return s;
    }
    case Kind::Product: {
      double s = 1.0;
      for (const auto& ch : children_) s *= ch.value(t);
      return s;
    }
  }
  return 0.0;
}

int RateFunction::degree() const {
  switch (kind_) {
    case Kind::Constant:
    case Kind::Piecewise:
      return 0;
    case Kind::Tabulated:
      return 1;
    case Kind::Sum: {
      int d = 0;
      for (const auto& ch : children_) d = std::max(d, ch.degree());
      return d;
    }
    case Kind::Product: {
      int d = 0;
      for (const auto& ch : children_) d += ch.degree();
      return d;
    }
  }
  return 0;
}

void RateFunction::collect_knots(std::vector<double>& out) const {
  switch (kind_) {
    case Kind::Constant:
      break;
    case Kind::Piecewise:
      out.insert(out.end(), xs_.begin() + 1, xs_.end());
      break;
    case Kind::Tabulated:
      out.insert(out.end(), xs_.begin(), xs_.end());
      break;
    case Kind::Sum:
    case Kind::Product:
      for (const auto& ch : children_) ch.collect_knots(out);
      break;
  }
}

std::vector<double> RateFunction::knots_between(double a, double b) const {
  std::vector<double> all;
  collect_knots(all);
  std::vector<double> out;
  for (double x : all)
    if (x > a && x < b) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double RateFunction::cumulative(double a, double b) const {
  require(a >= 0.0 && b >= a, "cumulative needs 0 <= a <= b");
  if (a == b) return 0.0;
  switch (kind_) {
    case Kind::Constant:
      return c_ * (b - a);
    case Kind::Piecewise: {
      double s = 0.0;
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        double lo = std::max(a, xs_[i]);
        double hi = (i + 1 < xs_.size()) ? std::min(b, xs_[i + 1]) : b;
        if (hi > lo) s += ys_[i] * (hi - lo);
      }
      return s;
    }
    case Kind::Tabulated: {
      // Exact: trapezoid inside the grid, clamped constants outside.
      double s = 0.0;
      auto seg = [&](double lo, double hi) {
        if (hi <= lo) return;
        s += 0.5 * (value(lo) + value(hi)) * (hi - lo);
      };
      seg(a, std::min(b, xs_.front()));
      for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
        seg(std::max(a, xs_[i]), std::min(b, xs_[i + 1]));
      seg(std::max(a, xs_.back()), b);
      return s;
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& ch : children_) s += ch.cumulative(a, b);
      return s;
    }
    case Kind::Product: {
      const GlRule& gl = rule_for_degree(degree());
      std::vector<double> cells = knots_between(a, b);
      cells.insert(cells.begin(), a);
      cells.push_back(b);
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        double mid = 0.5 * (cells[i] + cells[i + 1]);
        double half = 0.5 * (cells[i + 1] - cells[i]);
        double cell = 0.0;
        for (std::size_t k = 0; k < gl.x.size(); ++k)
          cell += gl.w[k] * value(mid + half * gl.x[k]);
        s += cell * half;
      }
      return s;
    }
  }
  return 0.0;
}

double RateFunction::sup_on(double a, double b) const {
  require(a >= 0.0 && b >= a, "sup_on needs 0 <= a <= b");
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Piecewise: {
      double m = 0.0;
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        double lo = xs_[i];
        double hi = (i + 1 < xs_.size())
                        ? xs_[i + 1]
                        : std::numeric_limits<double>::infinity();
        // Segment [lo, hi) intersects [a, b]?
        if (lo <= b && hi > a) m = std::max(m, ys_[i]);
      }
      return m;
    }
    case Kind::Tabulated: {
      double m = std::max(value(a), value(b));
      for (std::size_t i = 0; i < xs_.size(); ++i)
        if (xs_[i] > a && xs_[i] < b) m = std::max(m, ys_[i]);
      return m;
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& ch : children_) s += ch.sup_on(a, b);
      return s;
    }
    case Kind::Product: {
      double s = 1.0;
      for (const auto& ch : children_) s *= ch.sup_on(a, b);
      return s;
    }
  }
  return 0.0;
}

namespace {

/* Merge two step functions with a binary op; exact for piecewise algebra. */
RateFunction merge_piecewise(const RateFunction& a, const RateFunction& b,
                             bool product) {
  std::vector<double> breaks{0.0};
  auto add = [&](const RateFunction& f) {
    if (f.kind() == RateFunction::Kind::Piecewise)
      breaks.insert(breaks.end(), f.abscissae().begin() + 1,
                    f.abscissae().end());
  };
  add(a);
  add(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> vals(breaks.size());
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    double va = a.value(breaks[i]);
    double vb = b.value(breaks[i]);
    vals[i] = product ? va * vb : va + vb;
  }
  return RateFunction::piecewise(std::move(breaks), std::move(vals));
}

bool is_step(const RateFunction& f) {
  return f.kind() == RateFunction::Kind::Constant ||
         f.kind() == RateFunction::Kind::Piecewise;
}

}  // namespace

RateFunction RateFunction::make_composite(Kind kind, const RateFunction& a,
                                          const RateFunction& b) {
  RateFunction f;
  f.kind_ = kind;
  auto absorb = [&](const RateFunction& ch) {
    if (ch.kind_ == kind)  // flatten nested sums into sums, products into products
      f.children_.insert(f.children_.end(), ch.children_.begin(),
                         ch.children_.end());
    else
      f.children_.push_back(ch);
  };
  absorb(a);
  absorb(b);
  return f;
}

RateFunction operator+(const RateFunction& a, const RateFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant())
    return RateFunction::constant(a.constant_value() + b.constant_value());
  if (is_step(a) && is_step(b)) return merge_piecewise(a, b, false);
  auto shift_tab = [](const RateFunction& tab, double c) {
    std::vector<double> ys = tab.ordinates();
    for (double& y : ys) y += c;
    return RateFunction::tabulated(tab.abscissae(), std::move(ys));
  };
  if (a.kind() == RateFunction::Kind::Tabulated && b.is_constant())
    return shift_tab(a, b.constant_value());
  if (b.kind() == RateFunction::Kind::Tabulated && a.is_constant())
    return shift_tab(b, a.constant_value());
  if (a.kind() == RateFunction::Kind::Tabulated &&
      b.kind() == RateFunction::Kind::Tabulated) {
    // Piecewise linear on the merged grid; exact.
    std::vector<double> grid = a.abscissae();
    grid.insert(grid.end(), b.abscissae().begin(), b.abscissae().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      vals[i] = a.value(grid[i]) + b.value(grid[i]);
    return RateFunction::tabulated(std::move(grid), std::move(vals));
  }
  return RateFunction::make_composite(RateFunction::Kind::Sum, a, b);
}

RateFunction operator*(const RateFunction& a, const RateFunction& b) {
  if (a.is_zero() || b.is_zero()) return RateFunction::constant(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  if (a.is_constant() && b.is_constant())
    return RateFunction::constant(a.constant_value() * b.constant_value());
  if (is_step(a) && is_step(b)) return merge_piecewise(a, b, true);
  auto scale_tab = [](const RateFunction& tab, double c) {
    std::vector<double> ys = tab.ordinates();
    for (double& y : ys) y *= c;
    return RateFunction::tabulated(tab.abscissae(), std::move(ys));
  };
  if (a.kind() == RateFunction::Kind::Tabulated && b.is_constant())
    return scale_tab(a, b.constant_value());
  if (b.kind() == RateFunction::Kind::Tabulated && a.is_constant())
    return scale_tab(b, a.constant_value());
  return RateFunction::make_composite(RateFunction::Kind::Product, a, b);
}

}  // namespace ptproc
