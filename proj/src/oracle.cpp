#include "ptproc/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ptproc/skellam.hpp"

namespace ptproc::oracle {

std::size_t FiniteGenerator::index_of(std::array<int, 2> s) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == s) return i;
  throw std::out_of_range("oracle: state not in generator");
}

void FiniteGenerator::check_conservative(double tol) const {
  const std::size_t d = dim();
  if (q.size() != d * d)
    throw std::logic_error("oracle: generator storage size mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double e = entry(i, j);
      if (i != j && e < -tol)
        throw std::logic_error("oracle: negative off-diagonal rate");
      row += e;
    }
    if (std::abs(row) > tol)
      throw std::logic_error("oracle: generator row does not sum to zero");
  }
}

FiniteGenerator death_migration_generator(const bdm::BdmSpec& spec) {
  spec.validate();
  if (spec.lambda1 != 0.0 || spec.lambda2 != 0.0)
    throw std::invalid_argument(
        "oracle: death-migration generator needs zero birth rates");
  FiniteGenerator gen;
  const int total = spec.n1 + spec.n2;
  for (int m = 0; m <= total; ++m)
    for (int n = 0; n + m <= total; ++n) gen.states.push_back({m, n});
  const std::size_t d = gen.states.size();
  gen.q.assign(d * d, 0.0);
  auto add = [&](std::size_t i, std::array<int, 2> to, double rate) {
    if (rate <= 0.0) return;
    const std::size_t j = gen.index_of(to);
    gen.entry(i, j) += rate;
    gen.entry(i, i) -= rate;
  };
  for (std::size_t i = 0; i < d; ++i) {
    const auto [m, n] = gen.states[i];
    add(i, {m - 1, n}, spec.mu1 * m);
    add(i, {m, n - 1}, spec.mu2 * n);
    add(i, {m - 1, n + 1}, spec.eta1 * m);
    add(i, {m + 1, n - 1}, spec.eta2 * n);
  }
  return gen;
}

FiniteGenerator pure_migration_generator(const bdm::PureMigrationSpec& spec) {
  spec.validate();
  FiniteGenerator gen;
  const int total = spec.total();
  for (int k = 0; k <= total; ++k) gen.states.push_back({k, 0});
  gen.q.assign(gen.states.size() * gen.states.size(), 0.0);
  for (int k = 0; k <= total; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    if (k > 0) {
      const double r = spec.eta1 * k;
      gen.entry(i, i - 1) += r;
      gen.entry(i, i) -= r;
    }
    if (k < total) {
      const double r = spec.eta2 * (total - k);
      gen.entry(i, i + 1) += r;
      gen.entry(i, i) -= r;
    }
  }
  return gen;
}

FiniteGenerator birth_death_generator(double lambda, double mu, int cap) {
  if (lambda < 0.0 || mu < 0.0 || cap < 1)
    throw std::invalid_argument("oracle: bad birth-death parameters");
  FiniteGenerator gen;
  for (int k = 0; k <= cap; ++k) gen.states.push_back({k, 0});
  gen.q.assign(gen.states.size() * gen.states.size(), 0.0);
  for (int k = 0; k <= cap; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    if (k < cap && lambda * k > 0.0) {
      gen.entry(i, i + 1) += lambda * k;
      gen.entry(i, i) -= lambda * k;
    }
    if (k > 0 && mu * k > 0.0) {
      gen.entry(i, i - 1) += mu * k;
      gen.entry(i, i) -= mu * k;
    }
  }
  return gen;
}

std::vector<double> transient_pmf(const FiniteGenerator& gen,
                                  const std::vector<double>& p0, double t,
                                  double tail) {
  const std::size_t d = gen.dim();
  if (p0.size() != d)
    throw std::invalid_argument("oracle: initial law has wrong dimension");
  if (t < 0.0) throw std::invalid_argument("oracle: t must be non-negative");
  gen.check_conservative();
  double max_exit = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    max_exit = std::max(max_exit, -gen.entry(i, i));
  const double rate = 1.05 * max_exit;
  if (rate * t == 0.0) return p0;

  // Row-stochastic uniformized kernel P = I + Q / rate.
  std::vector<double> kernel(gen.q);
  for (auto& e : kernel) e /= rate;
  for (std::size_t i = 0; i < d; ++i) kernel[i * d + i] += 1.0;

  const double mean = rate * t;
  const int cutoff = skellam::poisson_tail_quantile(mean, tail);
  std::vector<double> v(p0), next(d), out(d, 0.0);
  const double log_mean = std::log(mean);
  for (int k = 0; k <= cutoff; ++k) {
    const double w =
        std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
    for (std::size_t j = 0; j < d; ++j) out[j] += w * v[j];
    if (k == cutoff) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const double* row = kernel.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) next[j] += vi * row[j];
    }
    v.swap(next);
  }
  return out;
}

std::vector<double> stationary(const FiniteGenerator& gen) {
  const std::size_t d = gen.dim();
  gen.check_conservative();
  Eigen::MatrixXd a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = gen.entry(j, i);  // Q^T
  for (std::size_t j = 0; j < d; ++j) a(d - 1, j) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  b(d - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = std::max(0.0, pi(i));
  double s = 0.0;
  for (double x : out) s += x;
  if (!(s > 0.0))
    throw std::runtime_error("oracle: stationary solve failed");
  for (double& x : out) x /= s;
  return out;
}

Table2 poisson_convolution_pmf(const std::vector<std::array<int, 2>>& jumps,
                               const std::vector<double>& means,
                               std::array<int, 2> initial,
                               std::array<int, 2> lo, std::array<int, 2> hi,
                               double tail, double max_truncation) {
  if (jumps.size() != means.size())
    throw std::invalid_argument("oracle: jumps/means size mismatch");
  if (lo[0] > hi[0] || lo[1] > hi[1])
    throw std::invalid_argument("oracle: empty window");
  for (double m : means)
    if (!(m >= 0.0) || !std::isfinite(m))
      throw std::invalid_argument("oracle: means must be non-negative");

  // Poisson truncation level per component.
  std::vector<int> cutoff(jumps.size(), 0);
  for (std::size_t i = 0; i < jumps.size(); ++i)
    if (means[i] > 0.0)
      cutoff[i] = skellam::poisson_tail_quantile(means[i], tail);

  // Working box: requested window and the initial point, padded by every
  // component's maximal displacement so no intermediate mass is clipped.
  std::array<int, 2> wlo = {std::min(lo[0], initial[0]),
                            std::min(lo[1], initial[1])};
  std::array<int, 2> whi = {std::max(hi[0], initial[0]),
                            std::max(hi[1], initial[1])};
  for (std::size_t i = 0; i < jumps.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      const int d = cutoff[i] * jumps[i][c];
      if (d > 0)
        whi[c] += d;
      else
        wlo[c] += d;
    }
  const int w = whi[0] - wlo[0] + 1;
  const int h = whi[1] - wlo[1] + 1;
  auto at = [&](int x, int y) {
    return static_cast<std::size_t>(x - wlo[0]) * h +
           static_cast<std::size_t>(y - wlo[1]);
  };
  std::vector<double> cur(static_cast<std::size_t>(w) * h, 0.0);
  cur[at(initial[0], initial[1])] = 1.0;
  std::vector<double> nxt(cur.size());

  for (std::size_t i = 0; i < jumps.size(); ++i) {
    if (means[i] == 0.0 || (jumps[i][0] == 0 && jumps[i][1] == 0)) continue;
    std::vector<double> weight(cutoff[i] + 1);
    const double lm = std::log(means[i]);
    for (int c = 0; c <= cutoff[i]; ++c)
      weight[c] = std::exp(-means[i] + c * lm - std::lgamma(c + 1.0));
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int x = wlo[0]; x <= whi[0]; ++x)
      for (int y = wlo[1]; y <= whi[1]; ++y) {
        const double mass = cur[at(x, y)];
        if (mass == 0.0) continue;
        for (int c = 0; c <= cutoff[i]; ++c) {
          const int tx = x + c * jumps[i][0];
          const int ty = y + c * jumps[i][1];
          if (tx < wlo[0] || tx > whi[0] || ty < wlo[1] || ty > whi[1])
            break;  // beyond the padded box: only ever the Poisson tail
          nxt[at(tx, ty)] += mass * weight[c];
        }
      }
    cur.swap(nxt);
  }

  Table2 table = Table2::box(lo, hi);
  double captured = 0.0;
  for (int x = lo[0]; x <= hi[0]; ++x)
    for (int y = lo[1]; y <= hi[1]; ++y) {
      const double p = cur[at(x, y)];
      table.p[table.index({x, y})] = p;
      captured += p;
    }
  table.truncation_bound = std::max(0.0, 1.0 - captured);
  if (table.truncation_bound > max_truncation)
    throw std::runtime_error(
        "oracle: window too small for the requested truncation bound");
  return table;
}

}  // namespace ptproc::oracle
