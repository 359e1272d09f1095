#include "ptproc/config.hpp"

#include <fstream>
#include <set>

namespace ptproc::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("config: missing field '") + key + "'");
  return *it;
}

double need_number(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number()) fail(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

int need_int(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer())
    fail(std::string("config: '") + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> number_list(const json& v, const char* key) {
  if (!v.is_array()) fail(std::string("config: '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      fail(std::string("config: '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      fail(std::string("config: unknown field '") + it.key() + "' in " +
           where);
}

}  // namespace

RateFunction rate_from_json(const json& j) {
  if (j.is_number()) return RateFunction::constant(j.get<double>());
  if (!j.is_object()) fail("config: a rate must be a number or an object");
  const json& kindj = need(j, "kind");
  if (!kindj.is_string()) fail("config: rate 'kind' must be a string");
  const std::string kind = kindj.get<std::string>();
  try {
    if (kind == "constant") {
      check_keys(j, {"kind", "value"}, "rate");
      return RateFunction::constant(need_number(j, "value"));
    }
    if (kind == "piecewise") {
      check_keys(j, {"kind", "breakpoints", "values"}, "rate");
      return RateFunction::piecewise(
          number_list(need(j, "breakpoints"), "breakpoints"),
          number_list(need(j, "values"), "values"));
    }
    if (kind == "tabulated") {
      check_keys(j, {"kind", "grid", "values"}, "rate");
      return RateFunction::tabulated(number_list(need(j, "grid"), "grid"),
                                     number_list(need(j, "values"), "values"));
    }
    if (kind == "sum" || kind == "product") {
      check_keys(j, {"kind", "terms"}, "rate");
      const json& terms = need(j, "terms");
      if (!terms.is_array() || terms.empty())
        fail("config: rate 'terms' must be a non-empty array");
      RateFunction acc = rate_from_json(terms[0]);
      for (std::size_t i = 1; i < terms.size(); ++i)
        acc = kind == "sum" ? acc + rate_from_json(terms[i])
                            : acc * rate_from_json(terms[i]);
      return acc;
    }
  } catch (const std::invalid_argument& e) {
    fail(std::string("config: bad rate: ") + e.what());
  }
  fail("config: unknown rate kind '" + kind + "'");
}

json rate_to_json(const RateFunction& r) {
  switch (r.kind()) {
    case RateFunction::Kind::Constant:
      return json{{"kind", "constant"}, {"value", r.constant_value()}};
    case RateFunction::Kind::Piecewise:
      return json{{"kind", "piecewise"},
                  {"breakpoints", r.abscissae()},
                  {"values", r.ordinates()}};
    case RateFunction::Kind::Tabulated:
      return json{{"kind", "tabulated"},
                  {"grid", r.abscissae()},
                  {"values", r.ordinates()}};
    case RateFunction::Kind::Sum:
    case RateFunction::Kind::Product: {
      json terms = json::array();
      for (const auto& c : r.children()) terms.push_back(rate_to_json(c));
      return json{
          {"kind", r.kind() == RateFunction::Kind::Sum ? "sum" : "product"},
          {"terms", terms}};
    }
  }
  fail("config: unserializable rate");
}

ProcessSpec process_from_json(const json& j) {
  if (!j.is_object()) fail("config: 'process' must be an object");
  const json& typej = need(j, "type");
  if (!typej.is_string()) fail("config: process 'type' must be a string");
  const std::string type = typej.get<std::string>();
  try {
    if (type == "nh_poisson") {
      check_keys(j, {"type", "rate"}, "process");
      return skellam::NhPoissonSpec{rate_from_json(need(j, "rate"))};
    }
    if (type == "nh_skellam") {
      check_keys(j, {"type", "rate_up", "rate_down", "initial"}, "process");
      skellam::NhSkellamSpec s;
      s.rate_up = rate_from_json(need(j, "rate_up"));
      s.rate_down = rate_from_json(need(j, "rate_down"));
      s.initial = j.contains("initial") ? need_int(j, "initial") : 0;
      return s;
    }
    if (type == "interacting_skellam") {
      check_keys(j,
                 {"type", "lambda1", "mu1", "delta1", "lambda2", "mu2",
                  "delta2", "eta12", "eta21", "n1", "n2"},
                 "process");
      interact::InteractingSkellamSpec s;
      s.lambda1 = rate_from_json(need(j, "lambda1"));
      s.mu1 = rate_from_json(need(j, "mu1"));
      s.delta1 = rate_from_json(need(j, "delta1"));
      s.lambda2 = rate_from_json(need(j, "lambda2"));
      s.mu2 = rate_from_json(need(j, "mu2"));
      s.delta2 = rate_from_json(need(j, "delta2"));
      s.eta12 = rate_from_json(need(j, "eta12"));
      s.eta21 = rate_from_json(need(j, "eta21"));
      s.n1 = j.contains("n1") ? need_int(j, "n1") : 0;
      s.n2 = j.contains("n2") ? need_int(j, "n2") : 0;
      return s;
    }
    if (type == "bdm") {
      check_keys(j,
                 {"type", "lambda1", "mu1", "eta1", "lambda2", "mu2", "eta2",
                  "n1", "n2"},
                 "process");
      bdm::BdmSpec s;
      s.lambda1 = need_number(j, "lambda1");
      s.mu1 = need_number(j, "mu1");
      s.eta1 = need_number(j, "eta1");
      s.lambda2 = need_number(j, "lambda2");
      s.mu2 = need_number(j, "mu2");
      s.eta2 = need_number(j, "eta2");
      s.n1 = need_int(j, "n1");
      s.n2 = need_int(j, "n2");
      s.validate();
      return s;
    }
    if (type == "pure_migration") {
      check_keys(j, {"type", "eta1", "eta2", "n1", "n2"}, "process");
      bdm::PureMigrationSpec s;
      s.eta1 = need_number(j, "eta1");
      s.eta2 = need_number(j, "eta2");
      s.n1 = need_int(j, "n1");
      s.n2 = need_int(j, "n2");
      s.validate();
      return s;
    }
  } catch (const std::invalid_argument& e) {
    fail(std::string("config: bad process: ") + e.what());
  }
  fail("config: unknown process type '" + type + "'");
}

timechange::BernsteinSpec subordinator_from_json(const json& j) {
  if (!j.is_object()) fail("config: 'subordinator' must be an object");
  const json& famj = need(j, "family");
  if (!famj.is_string()) fail("config: subordinator 'family' must be a string");
  const std::string family = famj.get<std::string>();
  timechange::BernsteinSpec s;
  try {
    if (family == "stable") {
      check_keys(j, {"family", "alpha", "drift", "kill"}, "subordinator");
      s.family = timechange::BernsteinSpec::Family::Stable;
      s.alpha = need_number(j, "alpha");
    } else if (family == "gamma") {
      check_keys(j, {"family", "shape", "rate", "drift", "kill"},
                 "subordinator");
      s.family = timechange::BernsteinSpec::Family::Gamma;
      s.gamma_shape = need_number(j, "shape");
      s.gamma_rate = need_number(j, "rate");
    } else if (family == "tabulated_tail") {
      check_keys(j, {"family", "grid", "values", "drift", "kill"},
                 "subordinator");
      s.family = timechange::BernsteinSpec::Family::TabulatedTail;
      s.tail_grid = number_list(need(j, "grid"), "grid");
      s.tail_values = number_list(need(j, "values"), "values");
    } else {
      fail("config: unknown subordinator family '" + family + "'");
    }
    if (j.contains("drift")) s.drift = need_number(j, "drift");
    if (j.contains("kill")) s.kill = need_number(j, "kill");
    s.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("config: bad subordinator: ") + e.what());
  }
  return s;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config: top level must be an object");
  check_keys(j,
             {"schema_version", "kind", "seed", "replicates", "threads",
              "horizon", "times", "out", "battery", "process", "subordinator",
              "alpha", "window"},
             "config");
  const json& ver = need(j, "schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    fail("config: unsupported schema_version (expected 1)");

  RunConfig cfg;
  cfg.raw = j;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) fail("config: 'kind' must be a string");
    cfg.kind = j["kind"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail("config: 'seed' must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("replicates")) {
    if (!j["replicates"].is_number_integer() ||
        j["replicates"].get<std::int64_t>() < 1)
      fail("config: 'replicates' must be a positive integer");
    cfg.replicates = j["replicates"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 0)
      fail("config: 'threads' must be a non-negative integer");
    cfg.threads = j["threads"].get<int>();
  }
  if (j.contains("horizon")) {
    cfg.horizon = need_number(j, "horizon");
    if (!(cfg.horizon > 0.0)) fail("config: 'horizon' must be positive");
  }
  if (j.contains("times")) {
    cfg.times = number_list(j["times"], "times");
    for (double t : cfg.times)
      if (!(t >= 0.0)) fail("config: 'times' must be non-negative");
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) fail("config: 'out' must be a string");
    cfg.out = j["out"].get<std::string>();
  }
  if (j.contains("battery")) {
    if (!j["battery"].is_string()) fail("config: 'battery' must be a string");
    cfg.battery = j["battery"].get<std::string>();
  }
  if (j.contains("process")) cfg.process = process_from_json(j["process"]);
  if (j.contains("subordinator"))
    cfg.subordinator = subordinator_from_json(j["subordinator"]);
  if (j.contains("alpha")) {
    cfg.alpha = need_number(j, "alpha");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
      fail("config: 'alpha' must be in (0, 1]");
  }
  if (j.contains("window")) {
    const json& w = j["window"];
    check_keys(w, {"lo", "hi"}, "window");
    auto lo = number_list(need(w, "lo"), "window.lo");
    auto hi = number_list(need(w, "hi"), "window.hi");
    if (lo.size() != 2 || hi.size() != 2)
      fail("config: 'window' must hold two-element lo/hi");
    cfg.window_lo = {{int(lo[0]), int(lo[1])}};
    cfg.window_hi = {{int(hi[0]), int(hi[1])}};
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace ptproc::config
