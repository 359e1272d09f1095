#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptproc/config.hpp"

namespace ptproc::experiment {

/* A named self-check battery runnable through `ptproc validate`. */
struct BatteryInfo {
  std::string name;
  std::string description;
  nlohmann::json template_config;
};

const std::vector<BatteryInfo>& batteries();

struct CheckRow {
  std::string name;
  std::string metric;  // "max_abs_err", "p_value", ...
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;  // value within the threshold, direction metric-specific
};

std::vector<CheckRow> run_battery(const std::string& name,
                                  const config::RunConfig& cfg);

struct RunOptions {
  std::string kind;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicates;
  std::string out_dir;
  int threads = -1;  // -1 = take from config
};

/* Executes one CLI request end to end: load config, run, write results.csv
 * and manifest.json under the output directory.  Returns the process exit
 * code: 0 success, 1 a validation battery reported failures, 2 usage or
 * configuration errors. */
int run(const RunOptions& opt, std::ostream& log);

}  // namespace ptproc::experiment
