#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ptproc/bdm.hpp"
#include "ptproc/interact.hpp"
#include "ptproc/ratefn.hpp"
#include "ptproc/skellam.hpp"
#include "ptproc/timechange.hpp"

namespace ptproc::config {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/* Rate functions appear in configs either as a bare number (constant) or as
 * {"kind": "constant"|"piecewise"|"tabulated"|"sum"|"product", ...}. */
RateFunction rate_from_json(const nlohmann::json& j);
nlohmann::json rate_to_json(const RateFunction& r);

using ProcessSpec =
    std::variant<skellam::NhPoissonSpec, skellam::NhSkellamSpec,
                 interact::InteractingSkellamSpec, bdm::BdmSpec,
                 bdm::PureMigrationSpec>;

ProcessSpec process_from_json(const nlohmann::json& j);
timechange::BernsteinSpec subordinator_from_json(const nlohmann::json& j);

struct RunConfig {
  std::string kind;  // one of: simulate pmf moments validate timechange
  std::uint64_t seed = 1;
  std::uint64_t replicates = 10000;
  int threads = 0;  // 0 = library default
  double horizon = 1.0;
  std::vector<double> times;  // moments evaluation grid
  std::string out;
  std::string battery;
  std::optional<ProcessSpec> process;
  std::optional<timechange::BernsteinSpec> subordinator;
  double alpha = 0.7;  // fractional order for `timechange`
  std::optional<std::array<int, 2>> window_lo, window_hi;  // pmf window
  nlohmann::json raw;  // echoed into the manifest
};

/* Parses and validates; throws ConfigError with a readable message. */
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

}  // namespace ptproc::config
