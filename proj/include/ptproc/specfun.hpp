#pragma once

#include <stdexcept>
#include <string>

namespace ptproc::specfun {

/* Truncation policy shared by the series evaluators: stop once the next term
 * falls below abs_tol relative to the running sum; failing to converge within
 * max_terms is an error, never a silent truncation. */
struct SeriesControl {
  double abs_tol = 1e-14;
  int max_terms = 10000;
};

class SeriesError : public std::runtime_error {
 public:
  explicit SeriesError(const std::string& what) : std::runtime_error(what) {}
};

/* Modified Bessel function of the first kind I_n(x), integer order, x >= 0.
 * All series terms are positive, so the sum is evaluated as a log-sum-exp and
 * is cancellation-free; log_bessel_i is the primary form (pmfs are assembled
 * in log space) and bessel_i = exp(log_bessel_i). I_{-n} = I_n. */
double bessel_i(int n, double x, const SeriesControl& ctl = {});
double log_bessel_i(int n, double x, const SeriesControl& ctl = {});

/* Mittag-Leffler function E_alpha(z) for alpha in (0,1], z <= 0.
 * Power series for small |z|; completely monotone integral representation
 * once series cancellation would cost digits; exp(z) at alpha = 1. */
double mittag_leffler(double alpha, double z, const SeriesControl& ctl = {});

/* Harmonic number H_n = sum_{k=1}^n 1/k. */
double harmonic_number(int n);

/* sum_{k=1}^{n} binom(n,k) (-1)^k / k, evaluated in exact rational arithmetic
 * (n <= 60) and rounded once at the end. Equals -H_n. */
double alternating_binomial_sum(int n);

/* Exact-rational check of the identity above: returns true iff
 * alternating_binomial_sum(n) + harmonic_number(n) == 0 as rationals. */
bool harmonic_identity_holds_exactly(int n);

/* Regularized upper incomplete gamma Q(a, x) (used for chi-square p-values). */
double gamma_q(double a, double x);

/* sinh(x)/x, series-stable near 0. */
double sinhc(double x);

}  // namespace ptproc::specfun
