#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <utility>

namespace ptproc::ode {

/* Adaptive Dormand-Prince 5(4) for small fixed-size systems y' = f(t, y).
 * Absolute error control on the embedded 4th-order estimate. */
template <std::size_t N, class F>
std::array<double, N> integrate(F f, double t0, double t1,
                                std::array<double, N> y, double abs_tol) {
  if (!(t1 >= t0)) throw std::invalid_argument("ode: t1 must be >= t0");
  if (t1 == t0) return y;

  // Butcher tableau (Dormand-Prince).
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                   e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640,
                   e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  using Vec = std::array<double, N>;
  auto axpy = [](Vec& out, const Vec& base, double h,
                 std::initializer_list<std::pair<double, const Vec*>> terms) {
    for (std::size_t i = 0; i < N; ++i) {
      double s = base[i];
      for (auto& [w, k] : terms) s += h * w * (*k)[i];
      out[i] = s;
    }
  };

  double t = t0;
  double h = (t1 - t0) / 16.0;
  const double h_min = (t1 - t0) * 1e-14;
  int rejects_in_a_row = 0;
  while (t < t1) {
    if (h > t1 - t) h = t1 - t;
    Vec k1 = f(t, y), tmp;
    axpy(tmp, y, h, {{a21, &k1}});
    Vec k2 = f(t + c2 * h, tmp);
    axpy(tmp, y, h, {{a31, &k1}, {a32, &k2}});
    Vec k3 = f(t + c3 * h, tmp);
    axpy(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    Vec k4 = f(t + c4 * h, tmp);
    axpy(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    Vec k5 = f(t + c5 * h, tmp);
    axpy(tmp, y, h,
         {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    Vec k6 = f(t + h, tmp);
    Vec y5;
    axpy(y5, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    Vec k7 = f(t + h, y5);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                      e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(e));
    }
    if (err <= abs_tol || h <= h_min) {
      t += h;
      y = y5;
      rejects_in_a_row = 0;
    } else if (++rejects_in_a_row > 60) {
      throw std::runtime_error("ode: step control failed to converge");
    }
    double scale = err > 0 ? 0.9 * std::pow(abs_tol / err, 0.2) : 5.0;
    h *= std::clamp(scale, 0.2, 5.0);
    if (h < h_min) h = h_min;
  }
  return y;
}

}  // namespace ptproc::ode
