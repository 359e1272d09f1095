#pragma once

#include <vector>

namespace ptproc {

/* Deterministic, non-negative, locally integrable rate function on [0, inf).
 *
 * Public kinds (these appear in config files):
 *   Constant   c
 *   Piecewise  right-continuous step function; breakpoints[0] == 0 and the
 *              last segment extends to infinity
 *   Tabulated  linear interpolation on a strictly increasing grid, clamped to
 *              the end values outside the grid
 *
 * Sums and products of rate functions fold to one of the public kinds when
 * that is exact (constant/piecewise are closed under + and *, constants
 * distribute over tabulated, tabulated + tabulated merges grids). The
 * remaining combinations are kept as composite Sum/Product nodes: values are
 * pointwise exact, and cumulative() integrates cell-by-cell with a
 * Gauss-Legendre rule whose order covers the per-cell polynomial degree, so
 * integrals are exact up to rounding for every kind.
 */
class RateFunction {
 public:
  enum class Kind { Constant, Piecewise, Tabulated, Sum, Product };

  RateFunction() : kind_(Kind::Constant), c_(0.0) {}

  static RateFunction constant(double c);
  static RateFunction piecewise(std::vector<double> breakpoints,
                                std::vector<double> values);
  static RateFunction tabulated(std::vector<double> grid,
                                std::vector<double> values);

  friend RateFunction operator+(const RateFunction& a, const RateFunction& b);
  friend RateFunction operator*(const RateFunction& a, const RateFunction& b);

  double value(double t) const;
  // Integral of the rate over [0, t] (or [a, b]).
  double cumulative(double t) const { return cumulative(0.0, t); }
  double cumulative(double a, double b) const;
  // Supremum over [a, b]; tight for the three public kinds, an upper bound
  // for composite nodes (all a thinning majorant needs).
  double sup_on(double a, double b) const;

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  bool is_zero() const { return kind_ == Kind::Constant && c_ == 0.0; }
  double constant_value() const;

  // Introspection used by serialization and samplers.
  const std::vector<double>& abscissae() const { return xs_; }
  const std::vector<double>& ordinates() const { return ys_; }
  const std::vector<RateFunction>& children() const { return children_; }

  // Sorted interior knots in (a, b): points where the local polynomial can
  // change. Thinning segments and exact integration cells come from these.
  std::vector<double> knots_between(double a, double b) const;

  // Upper bound on the polynomial degree between consecutive knots.
  int degree() const;

 private:
  void collect_knots(std::vector<double>& out) const;
  static RateFunction make_composite(Kind kind, const RateFunction& a,
                                     const RateFunction& b);

  Kind kind_;
  double c_ = 0.0;
  std::vector<double> xs_, ys_;         // Piecewise breaks / Tabulated grid
  std::vector<RateFunction> children_;  // Sum / Product operands
};

}  // namespace ptproc
