#include "ptproc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "ptproc/bdm.hpp"
#include "ptproc/interact.hpp"
#include "ptproc/mc.hpp"
#include "ptproc/oracle.hpp"
#include "ptproc/skellam.hpp"
#include "ptproc/stats.hpp"
#include "ptproc/timechange.hpp"
#include "ptproc/version.hpp"

namespace ptproc::experiment {

namespace {

using config::ConfigError;
using config::RunConfig;
using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/* ---------- histogram block for endpoint simulation ---------- */

struct HistogramBlock {
  std::map<std::array<int, 2>, std::uint64_t> counts;
  stats::Accumulator acc1, acc2;
  void merge(const HistogramBlock& o) {
    for (const auto& [k, v] : o.counts) counts[k] += v;
    acc1.merge(o.acc1);
    acc2.merge(o.acc2);
  }
};

int process_dim(const config::ProcessSpec& p) {
  if (std::holds_alternative<interact::InteractingSkellamSpec>(p) ||
      std::holds_alternative<bdm::BdmSpec>(p))
    return 2;
  return 1;
}

std::array<int, 2> one_endpoint(const config::ProcessSpec& p, double horizon,
                                Rng& rng) {
  if (const auto* s = std::get_if<skellam::NhPoissonSpec>(&p))
    return {skellam::sample_nh_poisson(*s, horizon, rng).endpoint()[0], 0};
  if (const auto* s = std::get_if<skellam::NhSkellamSpec>(&p))
    return {skellam::sample_skellam(*s, horizon, rng).endpoint()[0], 0};
  if (const auto* s = std::get_if<interact::InteractingSkellamSpec>(&p))
    return interact::sample_direct(*s, horizon, rng).endpoint();
  if (const auto* s = std::get_if<bdm::BdmSpec>(&p))
    return bdm::sample_gillespie(*s, horizon, rng).endpoint();
  const auto& s = std::get<bdm::PureMigrationSpec>(p);
  return {bdm::sample_pure_migration(s, horizon, rng).endpoint()[0], 0};
}

std::array<int, 2> one_time_changed_endpoint(
    const config::ProcessSpec& p, const timechange::BernsteinSpec& clock,
    double t, Rng& rng) {
  if (const auto* s = std::get_if<interact::InteractingSkellamSpec>(&p))
    return timechange::time_changed_endpoint(*s, clock, t, rng);
  if (const auto* s = std::get_if<bdm::BdmSpec>(&p))
    return timechange::time_changed_endpoint(*s, clock, t, rng);
  if (const auto* s = std::get_if<bdm::PureMigrationSpec>(&p))
    return {timechange::time_changed_endpoint(*s, clock, t, rng), 0};
  const double tau = timechange::sample_inverse(clock, t, rng);
  if (const auto* s = std::get_if<skellam::NhPoissonSpec>(&p)) {
    if (!s->rate.is_constant())
      throw ConfigError("config: time change needs a homogeneous base");
    return {tau > 0.0 ? skellam::sample_nh_poisson(*s, tau, rng).endpoint()[0]
                      : 0,
            0};
  }
  const auto& s = std::get<skellam::NhSkellamSpec>(p);
  if (!s.rate_up.is_constant() || !s.rate_down.is_constant())
    throw ConfigError("config: time change needs a homogeneous base");
  return {tau > 0.0 ? skellam::sample_skellam(s, tau, rng).endpoint()[0]
                    : s.initial,
          0};
}

/* ---------- CSV + manifest writing ---------- */

struct Outputs {
  std::filesystem::path dir;
  std::vector<std::string> files;
  json extra;  // run-kind specific manifest fields

  std::ofstream open_csv(const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);  // fixed \n endings
    if (!f) throw ConfigError("config: cannot write to '" + dir.string() + "'");
    files.push_back(name);
    return f;
  }
};

void write_manifest(Outputs& out, const RunConfig& cfg,
                    const RunOptions& opt, double wall_ms, int exit_code) {
  json m;
  m["tool"] = "ptproc";
  m["version"] = kVersion;
  m["kind"] = opt.kind;
  m["seed"] = cfg.seed;
  m["replicates"] = cfg.replicates;
  m["threads"] = cfg.threads == 0 ? json(nullptr) : json(cfg.threads);
  m["wall_ms"] = wall_ms;
  m["exit_code"] = exit_code;
  m["outputs"] = out.files;
  m["config"] = cfg.raw;
  if (!out.extra.is_null()) m["run"] = out.extra;
  std::filesystem::create_directories(out.dir);
  std::ofstream f(out.dir / "manifest.json", std::ios::binary);
  f << m.dump(2) << "\n";
}

/* ---------- kind: simulate ---------- */

int run_simulate(const RunConfig& cfg, Outputs& out) {
  if (!cfg.process) throw ConfigError("config: 'process' is required");
  const auto& proc = *cfg.process;
  const int dim = process_dim(proc);
  const bool changed = cfg.subordinator.has_value();
  auto block = mc::run_replicates<HistogramBlock>(
      cfg.replicates, cfg.seed,
      [&](HistogramBlock& acc, std::uint64_t, Rng& rng) {
        const std::array<int, 2> e =
            changed ? one_time_changed_endpoint(proc, *cfg.subordinator,
                                                cfg.horizon, rng)
                    : one_endpoint(proc, cfg.horizon, rng);
        ++acc.counts[e];
        acc.acc1.add(e[0]);
        acc.acc2.add(e[1]);
      },
      cfg.threads);

  auto csv = out.open_csv("results.csv");
  csv << (dim == 2 ? "n1,n2,count\n" : "k,count\n");
  for (const auto& [state, count] : block.counts) {
    if (dim == 2)
      csv << state[0] << ',' << state[1] << ',' << count << '\n';
    else
      csv << state[0] << ',' << count << '\n';
  }
  out.extra = json{{"mean1", block.acc1.mean()},
                   {"se1", block.acc1.se()},
                   {"time_changed", changed}};
  if (dim == 2) {
    out.extra["mean2"] = block.acc2.mean();
    out.extra["se2"] = block.acc2.se();
  }
  return 0;
}

/* ---------- kind: pmf ---------- */

int run_pmf(const RunConfig& cfg, Outputs& out) {
  if (!cfg.process) throw ConfigError("config: 'process' is required");
  const double t = cfg.horizon;
  auto csv = out.open_csv("results.csv");
  double bound = 0.0;
  if (const auto* s = std::get_if<skellam::NhPoissonSpec>(&*cfg.process)) {
    skellam::NhSkellamSpec as_skellam{s->rate, RateFunction::constant(0.0), 0};
    const Table1 table = skellam::skellam_table(as_skellam, t);
    csv << "k,probability\n";
    for (std::size_t i = 0; i < table.p.size(); ++i)
      csv << table.state_of(i)[0] << ',' << fmt(table.p[i]) << '\n';
    bound = table.truncation_bound;
  } else if (const auto* s =
                 std::get_if<skellam::NhSkellamSpec>(&*cfg.process)) {
    const Table1 table = skellam::skellam_table(*s, t);
    csv << "k,probability\n";
    for (std::size_t i = 0; i < table.p.size(); ++i)
      csv << table.state_of(i)[0] << ',' << fmt(table.p[i]) << '\n';
    bound = table.truncation_bound;
  } else if (const auto* s =
                 std::get_if<interact::InteractingSkellamSpec>(&*cfg.process)) {
    std::array<int, 2> lo, hi;
    if (cfg.window_lo && cfg.window_hi) {
      lo = *cfg.window_lo;
      hi = *cfg.window_hi;
    } else {
      auto [m1, m2] = interact::marginal_rates(*s);
      int a, b;
      skellam::skellam_support(m1, t, 1e-12, a, b);
      lo[0] = a;
      hi[0] = b;
      skellam::skellam_support(m2, t, 1e-12, a, b);
      lo[1] = a;
      hi[1] = b;
    }
    const Table2 table = interact::joint_table(*s, t, lo, hi);
    csv << "n1,n2,probability\n";
    for (std::size_t i = 0; i < table.p.size(); ++i) {
      const auto st = table.state_of(i);
      csv << st[0] << ',' << st[1] << ',' << fmt(table.p[i]) << '\n';
    }
    bound = table.truncation_bound;
  } else if (const auto* s = std::get_if<bdm::BdmSpec>(&*cfg.process)) {
    const Table2 table = bdm::death_migration_table(*s, t);  // needs lambda=0
    csv << "n1,n2,probability\n";
    for (std::size_t i = 0; i < table.p.size(); ++i) {
      const auto st = table.state_of(i);
      csv << st[0] << ',' << st[1] << ',' << fmt(table.p[i]) << '\n';
    }
    bound = table.truncation_bound;
  } else {
    const auto& pm = std::get<bdm::PureMigrationSpec>(*cfg.process);
    const Table1 table = bdm::pure_migration_table(pm, t);
    csv << "k,probability\n";
    for (std::size_t i = 0; i < table.p.size(); ++i)
      csv << table.state_of(i)[0] << ',' << fmt(table.p[i]) << '\n';
    bound = table.truncation_bound;
  }
  out.extra = json{{"t", t}, {"truncation_bound", bound}};
  return 0;
}

/* ---------- kind: moments ---------- */

int run_moments(const RunConfig& cfg, Outputs& out) {
  if (!cfg.process) throw ConfigError("config: 'process' is required");
  std::vector<double> times = cfg.times;
  if (times.empty()) times = {cfg.horizon};
  auto csv = out.open_csv("results.csv");
  if (const auto* s = std::get_if<bdm::BdmSpec>(&*cfg.process)) {
    csv << "t,mean1_closed,mean2_closed,mean1_ode,mean2_ode,cross_ode,"
           "fact1_ode,fact2_ode,cross_closed,fact1_closed,fact2_closed\n";
    for (double t : times) {
      const auto [m1, m2] = bdm::mean_vector(*s, t);
      const auto mom = bdm::moments_ode(*s, t);
      csv << fmt(t) << ',' << fmt(m1) << ',' << fmt(m2) << ',' << fmt(mom.en1)
          << ',' << fmt(mom.en2) << ',' << fmt(mom.en1n2) << ','
          << fmt(mom.fact1) << ',' << fmt(mom.fact2);
      try {
        const auto red = bdm::second_moments_reduced(*s, t);
        csv << ',' << fmt(red.en1n2) << ',' << fmt(red.fact1) << ','
            << fmt(red.fact2) << '\n';
      } catch (const std::exception&) {
        csv << ",nan,nan,nan\n";  // outside the reduced regime
      }
    }
  } else if (const auto* s =
                 std::get_if<interact::InteractingSkellamSpec>(&*cfg.process)) {
    csv << "t,mean1,mean2,var1,var2,covariance\n";
    const auto [r1, r2] = interact::marginal_rates(*s);
    for (double t : times) {
      const double up1 = r1.rate_up.cumulative(t);
      const double dn1 = r1.rate_down.cumulative(t);
      const double up2 = r2.rate_up.cumulative(t);
      const double dn2 = r2.rate_down.cumulative(t);
      csv << fmt(t) << ',' << fmt(s->n1 + up1 - dn1) << ','
          << fmt(s->n2 + up2 - dn2) << ',' << fmt(up1 + dn1) << ','
          << fmt(up2 + dn2) << ',' << fmt(interact::covariance(*s, t, t))
          << '\n';
    }
  } else if (const auto* s =
                 std::get_if<bdm::PureMigrationSpec>(&*cfg.process)) {
    csv << "t,mean,variance\n";
    for (double t : times) {
      const auto [p1, p2] = bdm::migration_occupancy(*s, t);
      csv << fmt(t) << ',' << fmt(s->n1 * p1 + s->n2 * p2) << ','
          << fmt(s->n1 * p1 * (1 - p1) + s->n2 * p2 * (1 - p2)) << '\n';
    }
  } else if (const auto* s = std::get_if<skellam::NhSkellamSpec>(&*cfg.process)) {
    csv << "t,mean,variance\n";
    for (double t : times)
      csv << fmt(t) << ','
          << fmt(s->initial + s->rate_up.cumulative(t) -
                 s->rate_down.cumulative(t))
          << ',' << fmt(s->rate_up.cumulative(t) + s->rate_down.cumulative(t))
          << '\n';
  } else {
    const auto& pois = std::get<skellam::NhPoissonSpec>(*cfg.process);
    csv << "t,mean,variance\n";
    for (double t : times) {
      const double m = pois.rate.cumulative(t);
      csv << fmt(t) << ',' << fmt(m) << ',' << fmt(m) << '\n';
    }
  }
  return 0;
}

/* ---------- kind: timechange ---------- */

int run_timechange(const RunConfig& cfg, Outputs& out) {
  if (!cfg.process) throw ConfigError("config: 'process' is required");
  oracle::FiniteGenerator gen;
  std::array<int, 2> start{};
  bool one_dim = false;
  if (const auto* s = std::get_if<bdm::PureMigrationSpec>(&*cfg.process)) {
    gen = oracle::pure_migration_generator(*s);
    start = {s->n1, 0};
    one_dim = true;
  } else if (const auto* s = std::get_if<bdm::BdmSpec>(&*cfg.process)) {
    gen = oracle::death_migration_generator(*s);  // needs lambda = 0
    start = {s->n1, s->n2};
  } else {
    throw ConfigError(
        "config: 'timechange' needs a finite-state process "
        "(pure_migration, or bdm with zero birth rates)");
  }
  std::vector<double> p0(gen.dim(), 0.0);
  p0[gen.index_of(start)] = 1.0;
  const auto res =
      timechange::fractional_distribution(gen, cfg.alpha, cfg.horizon, p0);
  auto csv = out.open_csv("results.csv");
  csv << (one_dim ? "k,probability\n" : "n1,n2,probability\n");
  for (std::size_t i = 0; i < gen.dim(); ++i) {
    if (one_dim)
      csv << gen.states[i][0] << ',' << fmt(res.pmf[i]) << '\n';
    else
      csv << gen.states[i][0] << ',' << gen.states[i][1] << ','
          << fmt(res.pmf[i]) << '\n';
  }
  out.extra = json{{"alpha", cfg.alpha},
                   {"t", cfg.horizon},
                   {"laplace_fallback", res.laplace_fallback}};
  return 0;
}

/* ---------- kind: validate (batteries) ---------- */

constexpr double kGofMinP = 1e-3;

void push_err(std::vector<CheckRow>& rows, const std::string& name,
              double err, double tol) {
  rows.push_back({name, "max_abs_err", err, tol, err <= tol});
}

void push_p(std::vector<CheckRow>& rows, const std::string& name, double p) {
  rows.push_back({name, "p_value", p, kGofMinP, p >= kGofMinP});
}

interact::InteractingSkellamSpec battery_interact_spec() {
  interact::InteractingSkellamSpec s;
  s.lambda1 = RateFunction::piecewise({0.0, 0.4}, {0.6, 0.9});
  s.mu1 = RateFunction::constant(0.5);
  s.delta1 = RateFunction::constant(0.7);
  s.lambda2 = RateFunction::tabulated({0.0, 1.0}, {0.8, 0.4});
  s.mu2 = RateFunction::constant(0.3);
  s.delta2 = RateFunction::constant(0.6);
  s.eta12 = RateFunction::constant(0.2);
  s.eta21 = RateFunction::constant(0.35);
  s.n1 = 1;
  s.n2 = 0;
  return s;
}

std::vector<CheckRow> battery_skellam_decomposition(const RunConfig& cfg) {
  std::vector<CheckRow> rows;
  const auto spec = battery_interact_spec();
  const double t = 0.8;

  // PGF of the process vs product over the decomposition.
  const auto dec = interact::decompose(spec);
  double worst = 0.0;
  for (double u : {0.6, 0.8, 1.0, 1.25})
    for (double v : {0.7, 0.9, 1.0, 1.2}) {
      const double lhs = interact::joint_pgf(spec, t, u, v);
      const double rhs = skellam::skellam_pgf(dec.s1, t, u) *
                         skellam::skellam_pgf(dec.s2, t, v) *
                         skellam::skellam_pgf(dec.s3, t, u * v) *
                         skellam::skellam_pgf(dec.s4, t, u / v);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  push_err(rows, "pgf-factorization", worst, 1e-12);

  // Joint pmf against the independent Poisson-superposition oracle, over a
  // window wide enough to hold all but ~1e-10 of each marginal.
  const auto menu = interact::jump_menu(spec);
  std::vector<std::array<int, 2>> jumps(menu.jumps.begin(), menu.jumps.end());
  std::vector<double> means;
  for (const auto& r : menu.rates) means.push_back(r.cumulative(t));
  const auto [mg1, mg2] = interact::marginal_rates(spec);
  std::array<int, 2> lo, hi;
  skellam::skellam_support(mg1, t, 1e-10, lo[0], hi[0]);
  skellam::skellam_support(mg2, t, 1e-10, lo[1], hi[1]);
  const auto ref = oracle::poisson_convolution_pmf(jumps, means,
                                                   {spec.n1, spec.n2}, lo, hi);
  const auto table = interact::joint_table(spec, t, lo, hi);
  worst = 0.0;
  for (std::size_t i = 0; i < table.p.size(); ++i)
    worst = std::max(worst, std::abs(table.p[i] - ref.prob(table.state_of(i))));
  push_err(rows, "pmf-vs-convolution", worst, 1e-9);

  // Two sampling routes must agree in law.
  struct Hist {
    std::map<std::array<int, 2>, std::uint64_t> direct, decomposed;
    void merge(const Hist& o) {
      for (const auto& [k, v] : o.direct) direct[k] += v;
      for (const auto& [k, v] : o.decomposed) decomposed[k] += v;
    }
  };
  auto hist = mc::run_replicates<Hist>(
      cfg.replicates, cfg.seed,
      [&](Hist& acc, std::uint64_t, Rng& rng) {
        ++acc.direct[interact::sample_direct(spec, t, rng).endpoint()];
        ++acc.decomposed[interact::sample_decomposed(spec, t, rng).endpoint()];
      },
      cfg.threads);
  std::map<std::array<int, 2>, std::uint64_t> keys = hist.direct;
  for (const auto& [k, v] : hist.decomposed) keys.emplace(k, 0 * v);
  std::vector<std::uint64_t> a, b;
  for (const auto& [k, v] : keys) {
    (void)v;
    a.push_back(hist.direct.count(k) ? hist.direct.at(k) : 0);
    b.push_back(hist.decomposed.count(k) ? hist.decomposed.at(k) : 0);
  }
  push_p(rows, "sampler-two-route", stats::chi_square_two_sample(a, b).p_value);
  return rows;
}

std::vector<CheckRow> battery_death_migration(const RunConfig& cfg) {
  (void)cfg;
  std::vector<CheckRow> rows;
  bdm::BdmSpec spec;
  spec.mu1 = 0.7;
  spec.eta1 = 0.3;
  spec.mu2 = 0.4;
  spec.eta2 = 0.5;
  spec.n1 = 3;
  spec.n2 = 2;
  const double t = 0.9;

  const auto gen = oracle::death_migration_generator(spec);
  std::vector<double> p0(gen.dim(), 0.0);
  p0[gen.index_of({spec.n1, spec.n2})] = 1.0;
  const auto ref = oracle::transient_pmf(gen, p0, t);

  double worst = 0.0;
  for (std::size_t i = 0; i < gen.dim(); ++i)
    worst = std::max(
        worst, std::abs(ref[i] - bdm::death_migration_pmf(
                                     spec, t, gen.states[i][0],
                                     gen.states[i][1])));
  push_err(rows, "pmf-vs-uniformization", worst, 1e-10);

  push_err(rows, "extinction-vs-oracle",
           std::abs(bdm::extinction_probability(spec, t) -
                    ref[gen.index_of({0, 0})]),
           1e-10);

  double cov = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < gen.dim(); ++i) {
    m1 += ref[i] * gen.states[i][0];
    m2 += ref[i] * gen.states[i][1];
  }
  for (std::size_t i = 0; i < gen.dim(); ++i)
    cov += ref[i] * (gen.states[i][0] - m1) * (gen.states[i][1] - m2);
  push_err(rows, "covariance-vs-oracle",
           std::abs(cov - bdm::death_migration_covariance(spec, t)), 1e-9);

  const double resid = bdm::pgf_pde_residual(
      spec,
      [&](double tt, double u, double v) {
        return bdm::death_migration_pgf(spec, tt, u, v);
      },
      t, 0.8, 0.9, 1e-4);
  push_err(rows, "pgf-pde-residual", std::abs(resid), 1e-6);
  return rows;
}

std::vector<CheckRow> battery_pure_migration(const RunConfig& cfg) {
  (void)cfg;
  std::vector<CheckRow> rows;
  bdm::PureMigrationSpec spec{0.8, 0.5, 4, 3};
  const double t = 1.2;

  const auto gen = oracle::pure_migration_generator(spec);
  std::vector<double> p0(gen.dim(), 0.0);
  p0[gen.index_of({spec.n1, 0})] = 1.0;
  const auto ref = oracle::transient_pmf(gen, p0, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < gen.dim(); ++i)
    worst = std::max(worst, std::abs(ref[i] - bdm::pure_migration_pmf(
                                                  spec, t, gen.states[i][0])));
  push_err(rows, "pmf-vs-uniformization", worst, 1e-11);

  const auto pi = oracle::stationary(gen);
  const auto binom = bdm::pure_migration_stationary(spec);
  worst = 0.0;
  for (std::size_t i = 0; i < gen.dim(); ++i)
    worst = std::max(worst, std::abs(pi[i] - binom.p[i]));
  push_err(rows, "stationary-vs-binomial", worst, 1e-10);

  push_err(rows, "pgf-pde-residual",
           std::abs(bdm::pure_migration_pde_residual(spec, t, 0.7, 1e-4)),
           1e-6);
  return rows;
}

std::vector<CheckRow> battery_bd_difference(const RunConfig& cfg) {
  (void)cfg;
  std::vector<CheckRow> rows;
  const double l1 = 0.6, m1 = 0.9, l2 = 0.5, m2 = 0.8, t = 1.1;
  const int cap = 60;

  auto chain_pmf = [&](double l, double m) {
    const auto gen = oracle::birth_death_generator(l, m, cap);
    std::vector<double> p0(gen.dim(), 0.0);
    p0[1] = 1.0;  // one initial individual
    return oracle::transient_pmf(gen, p0, t);
  };
  const auto q1 = chain_pmf(l1, m1);
  const auto q2 = chain_pmf(l2, m2);

  double worst = 0.0;
  for (int k = 0; k <= 10; ++k)
    worst = std::max(worst, std::abs(q1[k] - bdm::bd_pmf(l1, m1, t, k)));
  push_err(rows, "bd-pmf-vs-uniformization", worst, 1e-9);

  worst = 0.0;
  for (int k = -8; k <= 8; ++k) {
    double conv = 0.0;
    for (int h = std::max(0, k); h <= cap && h - k <= cap; ++h)
      conv += q1[h] * q2[h - k];
    worst = std::max(worst,
                     std::abs(conv - bdm::bd_difference_pmf(l1, m1, l2, m2,
                                                            t, k)));
  }
  push_err(rows, "difference-vs-convolution", worst, 1e-9);

  double mass = 0.0;
  for (int k = -80; k <= 80; ++k)
    mass += bdm::bd_difference_pmf(l1, m1, l2, m2, t, k);
  push_err(rows, "difference-total-mass", std::abs(1.0 - mass), 1e-9);
  return rows;
}

std::vector<CheckRow> battery_mean_covariance(const RunConfig& cfg) {
  (void)cfg;
  std::vector<CheckRow> rows;
  bdm::BdmSpec gen_spec{0.4, 0.6, 0.3, 0.7, 0.2, 0.5, 2, 1};
  const double t = 1.3;
  const auto [c1, c2] = bdm::mean_vector(gen_spec, t);
  const auto ode = bdm::moments_ode(gen_spec, t);
  push_err(rows, "mean-closed-vs-ode",
           std::max(std::abs(c1 - ode.en1), std::abs(c2 - ode.en2)), 1e-8);

  bdm::BdmSpec red{0.9, 0.5, 0.09, 0.6, 0.2, 0.09, 3, 1};
  const auto closed = bdm::second_moments_reduced(red, t);
  const auto ref = bdm::moments_ode(red, t);
  const double err = std::max({std::abs(closed.en1n2 - ref.en1n2),
                               std::abs(closed.fact1 - ref.fact1),
                               std::abs(closed.fact2 - ref.fact2)});
  push_err(rows, "reduced-second-moments-vs-ode", err, 1e-7);
  return rows;
}

std::vector<CheckRow> battery_fractional_migration(const RunConfig& cfg) {
  std::vector<CheckRow> rows;
  bdm::PureMigrationSpec spec{0.6, 0.9, 3, 2};
  const double t = 1.0, alpha = 0.7;
  const auto gen = oracle::pure_migration_generator(spec);
  std::vector<double> p0(gen.dim(), 0.0);
  p0[gen.index_of({spec.n1, 0})] = 1.0;

  const auto frac = timechange::fractional_distribution(gen, alpha, t, p0);
  double sum = 0.0, most_negative = 0.0;
  for (double p : frac.pmf) {
    sum += p;
    most_negative = std::min(most_negative, p);
  }
  push_err(rows, "fractional-pmf-normalization", std::abs(1.0 - sum), 1e-10);
  push_err(rows, "fractional-pmf-nonnegative", -most_negative, 1e-10);

  const auto one = timechange::fractional_distribution(gen, 1.0, t, p0);
  const auto ref = oracle::transient_pmf(gen, p0, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < gen.dim(); ++i)
    worst = std::max(worst, std::abs(one.pmf[i] - ref[i]));
  push_err(rows, "alpha-one-recovers-markov", worst, 1e-10);

  // Monte Carlo endpoints through the inverse stable clock vs the spectral
  // law.
  timechange::BernsteinSpec clock;
  clock.family = timechange::BernsteinSpec::Family::Stable;
  clock.alpha = alpha;
  struct Hist {
    std::map<int, std::uint64_t> counts;
    void merge(const Hist& o) {
      for (const auto& [k, v] : o.counts) counts[k] += v;
    }
  };
  auto hist = mc::run_replicates<Hist>(
      cfg.replicates, cfg.seed,
      [&](Hist& acc, std::uint64_t, Rng& rng) {
        ++acc.counts[timechange::time_changed_endpoint(spec, clock, t, rng)];
      },
      cfg.threads);
  std::vector<double> expected;
  std::vector<std::uint64_t> observed;
  for (std::size_t i = 0; i < gen.dim(); ++i) {
    expected.push_back(frac.pmf[i] * double(cfg.replicates));
    const int k = gen.states[i][0];
    observed.push_back(hist.counts.count(k) ? hist.counts.at(k) : 0);
  }
  push_p(rows, "time-changed-mc-gof",
         stats::chi_square_gof(expected, observed).p_value);
  return rows;
}

RunConfig load_config_checked(const RunOptions& opt) {
  if (opt.config_path.empty())
    throw ConfigError("config: --config is required");
  RunConfig cfg = config::load_config_file(opt.config_path);
  if (!cfg.kind.empty() && cfg.kind != opt.kind)
    throw ConfigError("config: file declares kind '" + cfg.kind +
                      "' but the command is '" + opt.kind + "'");
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.replicates) cfg.replicates = *opt.replicates;
  if (opt.threads >= 0) cfg.threads = opt.threads;
  return cfg;
}

const std::vector<BatteryInfo>& battery_catalog() {
  static const std::vector<BatteryInfo> kBatteries = [] {
    auto base = [](const char* battery) {
      return json{{"schema_version", 1},
                  {"kind", "validate"},
                  {"battery", battery},
                  {"seed", 20260814},
                  {"replicates", 20000}};
    };
    std::vector<BatteryInfo> v;
    v.push_back({"skellam-decomposition",
                 "interacting Skellam process: PGF factorization over the "
                 "independent decomposition, joint pmf vs a Poisson "
                 "superposition oracle, and agreement of the two samplers",
                 base("skellam-decomposition")});
    v.push_back({"death-migration-multinomial",
                 "death-migration closed-form law vs uniformization of the "
                 "full generator, plus extinction, covariance and the PGF "
                 "transport equation",
                 base("death-migration-multinomial")});
    v.push_back({"pure-migration",
                 "two-binomial law and binomial stationary law vs the exact "
                 "finite chain, plus the PGF transport equation",
                 base("pure-migration")});
    v.push_back({"bd-difference",
                 "linear birth-death law from one individual and the "
                 "difference law vs truncated-chain uniformization",
                 base("bd-difference")});
    v.push_back({"mean-covariance",
                 "closed-form means and reduced-regime second moments vs "
                 "the moment ODE system",
                 base("mean-covariance")});
    v.push_back({"fractional-migration",
                 "fractional pure-migration law: spectral Mittag-Leffler "
                 "solution validity, alpha = 1 consistency, and Monte Carlo "
                 "endpoints through the inverse stable clock",
                 base("fractional-migration")});
    return v;
  }();
  return kBatteries;
}

}  // namespace

const std::vector<BatteryInfo>& batteries() { return battery_catalog(); }

std::vector<CheckRow> run_battery(const std::string& name,
                                  const RunConfig& cfg) {
  if (name == "skellam-decomposition") return battery_skellam_decomposition(cfg);
  if (name == "death-migration-multinomial") return battery_death_migration(cfg);
  if (name == "pure-migration") return battery_pure_migration(cfg);
  if (name == "bd-difference") return battery_bd_difference(cfg);
  if (name == "mean-covariance") return battery_mean_covariance(cfg);
  if (name == "fractional-migration") return battery_fractional_migration(cfg);
  throw ConfigError("config: unknown battery '" + name + "'");
}

int run(const RunOptions& opt, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  try {
    RunConfig cfg = load_config_checked(opt);
    Outputs out;
    if (!opt.out_dir.empty())
      out.dir = opt.out_dir;
    else if (!cfg.out.empty())
      out.dir = cfg.out;
    else
      out.dir = "ptproc-out";

    int code = 0;
    if (opt.kind == "simulate") {
      code = run_simulate(cfg, out);
    } else if (opt.kind == "pmf") {
      code = run_pmf(cfg, out);
    } else if (opt.kind == "moments") {
      code = run_moments(cfg, out);
    } else if (opt.kind == "timechange") {
      code = run_timechange(cfg, out);
    } else if (opt.kind == "validate") {
      if (cfg.battery.empty())
        throw ConfigError("config: 'battery' is required for validate");
      const auto rows = run_battery(cfg.battery, cfg);
      auto csv = out.open_csv("results.csv");
      csv << "check,metric,value,threshold,pass\n";
      bool all_pass = true;
      for (const auto& r : rows) {
        csv << r.name << ',' << r.metric << ',' << fmt(r.value) << ','
            << fmt(r.threshold) << ',' << (r.pass ? "true" : "false") << '\n';
        all_pass = all_pass && r.pass;
        log << (r.pass ? "PASS " : "FAIL ") << cfg.battery << "/" << r.name
            << "  " << r.metric << " = " << r.value << " (threshold "
            << r.threshold << ")\n";
      }
      out.extra = json{{"battery", cfg.battery}, {"all_pass", all_pass}};
      code = all_pass ? 0 : 1;
    } else {
      throw ConfigError("config: unknown kind '" + opt.kind + "'");
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - started)
            .count();
    write_manifest(out, cfg, opt, wall_ms, code);
    log << "wrote " << (out.dir / "manifest.json").string() << "\n";
    return code;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ptproc::experiment
