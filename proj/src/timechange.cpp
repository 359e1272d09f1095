#include "ptproc/timechange.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "ptproc/specfun.hpp"

namespace ptproc::timechange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool tail_is_zero(const BernsteinSpec& spec) {
  for (double v : spec.tail_values)
    if (v != 0.0) return false;
  return true;
}

/* Gamma(shape, rate) increment of the gamma subordinator over dx. */
double gamma_increment(const BernsteinSpec& spec, double dx, Rng& rng) {
  return rng.gamma(spec.gamma_shape * dx, 1.0 / spec.gamma_rate);
}

/* B ~ Beta(a, a); for underflowed tiny shapes the law concentrates on
 * {0, 1} with equal mass. */
double symmetric_beta(double a, Rng& rng) {
  const double g1 = rng.gamma(a, 1.0);
  const double g2 = rng.gamma(a, 1.0);
  const double s = g1 + g2;
  if (s <= 0.0) return rng.uniform() < 0.5 ? 0.0 : 1.0;
  return g1 / s;
}

}  // namespace

void BernsteinSpec::validate() const {
  if (!(drift >= 0.0) || !(kill >= 0.0))
    throw std::invalid_argument(
        "timechange: drift and kill rate must be non-negative");
  switch (family) {
    case Family::Stable:
      if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::invalid_argument("timechange: alpha must be in (0, 1]");
      break;
    case Family::Gamma:
      if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0))
        throw std::invalid_argument(
            "timechange: gamma shape and rate must be positive");
      break;
    case Family::TabulatedTail: {
      if (tail_grid.size() != tail_values.size() || tail_grid.empty())
        throw std::invalid_argument("timechange: bad tabulated tail");
      if (!(tail_grid[0] >= 0.0))
        throw std::invalid_argument(
            "timechange: tail grid must be non-negative");
      double prev_v = kInf;
      for (std::size_t i = 0; i < tail_grid.size(); ++i) {
        if (i > 0 && !(tail_grid[i] > tail_grid[i - 1]))
          throw std::invalid_argument(
              "timechange: tail grid must be strictly increasing");
        if (!(tail_values[i] >= 0.0) || tail_values[i] > prev_v)
          throw std::invalid_argument(
              "timechange: tail values must be non-negative, non-increasing");
        prev_v = tail_values[i];
      }
      if (drift == 0.0 && kill == 0.0 && tail_is_zero(*this))
        throw std::invalid_argument("timechange: identically zero symbol");
      break;
    }
  }
}

double levy_symbol(const BernsteinSpec& spec, double x) {
  spec.validate();
  if (!(x >= 0.0))
    throw std::invalid_argument("timechange: x must be non-negative");
  double f = spec.kill + spec.drift * x;
  switch (spec.family) {
    case BernsteinSpec::Family::Stable:
      if (x > 0.0) f += std::pow(x, spec.alpha);
      break;
    case BernsteinSpec::Family::Gamma:
      f += spec.gamma_shape * std::log1p(x / spec.gamma_rate);
      break;
    case BernsteinSpec::Family::TabulatedTail: {
      if (x == 0.0) break;
      // x * int_0^inf e^{-xw} T(w) dw, T piecewise linear on the grid,
      // constant below the first node, zero beyond the last.
      double integral = 0.0;
      auto segment = [&](double a, double b, double va, double vb) {
        if (b <= a) return;
        const double c = b - a;
        const double slope = (vb - va) / c;
        const double ea = std::exp(-x * a);
        const double ec = std::exp(-x * c);
        integral += va * ea * (1.0 - ec) / x +
                    slope * ea * (1.0 - ec * (1.0 + x * c)) / (x * x);
      };
      if (spec.tail_grid.front() > 0.0)
        segment(0.0, spec.tail_grid.front(), spec.tail_values.front(),
                spec.tail_values.front());
      for (std::size_t i = 0; i + 1 < spec.tail_grid.size(); ++i)
        segment(spec.tail_grid[i], spec.tail_grid[i + 1], spec.tail_values[i],
                spec.tail_values[i + 1]);
      f += x * integral;
      break;
    }
  }
  return f;
}

std::vector<double> sample_subordinator(const BernsteinSpec& spec,
                                        const std::vector<double>& x_grid,
                                        Rng& rng) {
  spec.validate();
  double prev = 0.0;
  for (double x : x_grid) {
    if (!(x > prev))
      throw std::invalid_argument(
          "timechange: x grid must be positive and increasing");
    prev = x;
  }
  if (spec.family == BernsteinSpec::Family::TabulatedTail &&
      !tail_is_zero(spec))
    throw std::invalid_argument(
        "timechange: no sampler for tabulated jump tails");
  const double kill_at =
      spec.kill > 0.0 ? rng.exponential(spec.kill) : kInf;
  std::vector<double> out;
  out.reserve(x_grid.size());
  double h = 0.0;
  prev = 0.0;
  for (double x : x_grid) {
    if (x >= kill_at) {
      out.push_back(kInf);
      continue;
    }
    const double dx = x - prev;
    double inc = spec.drift * dx;
    switch (spec.family) {
      case BernsteinSpec::Family::Stable:
        inc += spec.alpha == 1.0
                   ? dx
                   : std::pow(dx, 1.0 / spec.alpha) *
                         sample_positive_stable(spec.alpha, rng);
        break;
      case BernsteinSpec::Family::Gamma:
        inc += gamma_increment(spec, dx, rng);
        break;
      case BernsteinSpec::Family::TabulatedTail:
        break;  // drift only
    }
    h += inc;
    prev = x;
    out.push_back(h);
  }
  return out;
}

double sample_inverse(const BernsteinSpec& spec, double t, Rng& rng,
                      double resolution_factor) {
  spec.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("timechange: t >= 0 required");
  if (t == 0.0) return 0.0;
  const double cap = spec.kill > 0.0 ? rng.exponential(spec.kill) : kInf;

  switch (spec.family) {
    case BernsteinSpec::Family::Stable: {
      if (spec.drift != 0.0)
        throw std::invalid_argument(
            "timechange: stable inverse sampler needs zero drift");
      if (spec.alpha == 1.0) return std::min(t, cap);
      const double s = sample_positive_stable(spec.alpha, rng);
      return std::min(std::pow(t / s, spec.alpha), cap);
    }
    case BernsteinSpec::Family::TabulatedTail: {
      if (!tail_is_zero(spec))
        throw std::invalid_argument(
            "timechange: no inverse sampler for tabulated jump tails");
      if (spec.drift == 0.0)
        throw std::invalid_argument(
            "timechange: zero clock never reaches positive times");
      return std::min(t / spec.drift, cap);
    }
    case BernsteinSpec::Family::Gamma:
      break;
  }

  // Gamma family: walk coarse increments to bracket the crossing of level t,
  // then halve the bracket with conditional beta splits.
  if (!(resolution_factor > 0.0))
    throw std::invalid_argument("timechange: resolution must be positive");
  const double resolution = t * resolution_factor;
  const double mean_slope =
      spec.gamma_shape / spec.gamma_rate + spec.drift;
  const double coarse = std::max(resolution, t / mean_slope / 8.0);
  double x = 0.0, h = 0.0;
  double width = 0.0, jump_part = 0.0;
  for (;;) {
    if (x >= cap) return cap;
    const double step = std::min(coarse, cap - x);
    const double gj = gamma_increment(spec, step, rng);
    if (h + gj + spec.drift * step >= t) {
      width = step;
      jump_part = gj;
      break;
    }
    h += gj + spec.drift * step;
    x += step;
  }
  while (width > resolution) {
    const double half = 0.5 * width;
    const double mj =
        jump_part * symmetric_beta(spec.gamma_shape * half, rng);
    if (h + mj + spec.drift * half >= t) {
      width = half;
      jump_part = mj;
    } else {
      h += mj + spec.drift * half;
      x += half;
      width = half;
      jump_part -= mj;
    }
  }
  return std::min(x + 0.5 * width, cap);
}

std::vector<double> sample_inverse_path(const BernsteinSpec& spec,
                                        const std::vector<double>& t_grid,
                                        Rng& rng, double dx) {
  spec.validate();
  if (!(dx > 0.0)) throw std::invalid_argument("timechange: dx must be > 0");
  double prev = -1.0;
  for (double t : t_grid) {
    if (!(t >= 0.0) || t < prev)
      throw std::invalid_argument(
          "timechange: t grid must be non-negative and non-decreasing");
    prev = t;
  }
  if (spec.family == BernsteinSpec::Family::TabulatedTail &&
      !tail_is_zero(spec))
    throw std::invalid_argument(
        "timechange: no sampler for tabulated jump tails");
  const double kill_at =
      spec.kill > 0.0 ? rng.exponential(spec.kill) : kInf;
  std::vector<double> out;
  out.reserve(t_grid.size());
  double x = 0.0, h = 0.0;
  for (double t : t_grid) {
    if (t == 0.0) {
      out.push_back(0.0);
      continue;
    }
    while (h < t && x < kill_at) {
      double inc = spec.drift * dx;
      switch (spec.family) {
        case BernsteinSpec::Family::Stable:
          inc += spec.alpha == 1.0
                     ? dx
                     : std::pow(dx, 1.0 / spec.alpha) *
                           sample_positive_stable(spec.alpha, rng);
          break;
        case BernsteinSpec::Family::Gamma:
          inc += gamma_increment(spec, dx, rng);
          break;
        case BernsteinSpec::Family::TabulatedTail:
          if (spec.drift == 0.0)
            throw std::invalid_argument(
                "timechange: zero clock never reaches positive times");
          break;
      }
      h += inc;
      x += dx;
    }
    out.push_back(std::min(x, kill_at));
  }
  return out;
}

double laplace_of_inverse(const BernsteinSpec& spec, double t, double y) {
  spec.validate();
  if (spec.family != BernsteinSpec::Family::Stable || spec.drift != 0.0 ||
      spec.kill != 0.0)
    throw std::invalid_argument(
        "timechange: closed-form inverse transform needs the plain stable "
        "clock");
  if (!(t >= 0.0) || !(y >= 0.0))
    throw std::invalid_argument("timechange: t, y >= 0 required");
  return specfun::mittag_leffler(spec.alpha, -y * std::pow(t, spec.alpha));
}

double renewal_waiting_survival(const BernsteinSpec& spec, double rate,
                                double t) {
  if (!(rate >= 0.0))
    throw std::invalid_argument("timechange: rate must be non-negative");
  return laplace_of_inverse(spec, t, rate);
}

FractionalResult fractional_distribution(const oracle::FiniteGenerator& gen,
                                         double alpha, double t,
                                         const std::vector<double>& p0) {
  if (!(alpha > 0.0) || !(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("timechange: alpha must be in (0, 1]");
  if (!(t >= 0.0)) throw std::invalid_argument("timechange: t >= 0 required");
  const std::size_t d = gen.dim();
  if (p0.size() != d)
    throw std::invalid_argument("timechange: initial law dimension mismatch");
  FractionalResult out;
  if (t == 0.0) {
    out.pmf = p0;
    return out;
  }

  Eigen::MatrixXd a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = gen.entry(j, i);  // Q^T
  const double talpha = std::pow(t, alpha);

  // Spectral route: p(t) = sum_j c_j E_alpha(theta_j t^alpha).
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  bool spectral_ok = es.info() == Eigen::Success;
  if (spectral_ok) {
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
      const auto ev = es.eigenvalues()(j);
      if (std::abs(ev.imag()) > 1e-9 * (1.0 + std::abs(ev.real())) ||
          ev.real() > 1e-9)
        spectral_ok = false;
    }
  }
  if (spectral_ok) {
    const Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e8) spectral_ok = false;
    if (spectral_ok) {
      Eigen::VectorXcd rhs(d);
      for (std::size_t i = 0; i < d; ++i) rhs(i) = p0[i];
      const Eigen::VectorXcd w = v.partialPivLu().solve(rhs);
      out.eigenvalues.resize(d);
      out.coefficients.assign(d, std::vector<double>(d, 0.0));
      std::vector<double> ml(d);
      for (std::size_t j = 0; j < d; ++j) {
        out.eigenvalues[j] = std::min(0.0, es.eigenvalues()(j).real());
        ml[j] =
            specfun::mittag_leffler(alpha, out.eigenvalues[j] * talpha);
      }
      out.pmf.assign(d, 0.0);
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t j = 0; j < d; ++j) {
          const std::complex<double> term = v(s, j) * w(j);
          if (std::abs(term.imag()) > 1e-8) {
            spectral_ok = false;
            break;
          }
          out.coefficients[s][j] = term.real();
          out.pmf[s] += term.real() * ml[j];
        }
    }
  }
  if (spectral_ok) return out;

  // Fixed-Talbot inversion of p~(s) = s^{alpha-1} (s^alpha I - Q^T)^{-1} p0.
  out = FractionalResult{};
  out.laplace_fallback = true;
  constexpr int kNodes = 24;
  const double r = 2.0 * kNodes / (5.0 * t);
  Eigen::VectorXcd rhs(d);
  for (std::size_t i = 0; i < d; ++i) rhs(i) = p0[i];
  auto transform = [&](std::complex<double> s) -> Eigen::VectorXcd {
    const std::complex<double> sa = std::pow(s, alpha);
    Eigen::MatrixXcd m = -a.cast<std::complex<double>>();
    for (std::size_t i = 0; i < d; ++i) m(i, i) += sa;
    return std::pow(s, alpha - 1.0) * m.partialPivLu().solve(rhs).eval();
  };
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  acc += (0.5 * std::exp(r * t) * transform(std::complex<double>(r, 0.0)))
             .real();
  for (int k = 1; k < kNodes; ++k) {
    const double theta = k * M_PI / kNodes;
    const double cot = std::cos(theta) / std::sin(theta);
    const std::complex<double> s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    const Eigen::VectorXcd f = transform(s);
    const std::complex<double> weight =
        std::exp(s * t) * std::complex<double>(1.0, sigma);
    for (std::size_t i = 0; i < d; ++i) acc(i) += (weight * f(i)).real();
  }
  out.pmf.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.pmf[i] = acc(i) * r / kNodes;
  return out;
}

std::array<int, 2> time_changed_endpoint(
    const interact::InteractingSkellamSpec& base, const BernsteinSpec& clock,
    double t, Rng& rng) {
  const RateFunction* all[] = {&base.lambda1, &base.mu1,   &base.delta1,
                               &base.lambda2, &base.mu2,   &base.delta2,
                               &base.eta12,   &base.eta21};
  for (const RateFunction* r : all)
    if (!r->is_constant())
      throw std::invalid_argument(
          "timechange: the base process must be time-homogeneous");
  const double tau = sample_inverse(clock, t, rng);
  if (tau <= 0.0) return {base.n1, base.n2};
  return interact::sample_direct(base, tau, rng).endpoint();
}

std::array<int, 2> time_changed_endpoint(const bdm::BdmSpec& base,
                                         const BernsteinSpec& clock, double t,
                                         Rng& rng) {
  const double tau = sample_inverse(clock, t, rng);
  if (tau <= 0.0) return {base.n1, base.n2};
  return bdm::sample_gillespie(base, tau, rng).endpoint();
}

int time_changed_endpoint(const bdm::PureMigrationSpec& base,
                          const BernsteinSpec& clock, double t, Rng& rng) {
  const double tau = sample_inverse(clock, t, rng);
  if (tau <= 0.0) return base.n1;
  return bdm::sample_pure_migration(base, tau, rng).endpoint()[0];
}

}  // namespace ptproc::timechange
