#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ptproc/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

fs::path scratch_root() {
  static const fs::path p = [] {
    auto dir = fs::temp_directory_path() /
               ("ptproc-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
  }();
  return p;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = scratch_root() / ("log" + std::to_string(counter++));
  const std::string cmd = std::string("'") + PTPROC_CLI_PATH + "' " + args +
                          " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  std::ifstream f(log);
  std::stringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = scratch_root() / name;
  std::ofstream f(p);
  f << j.dump(2);
  return p;
}

json migration_config(const std::string& kind) {
  return json{{"schema_version", 1},
              {"kind", kind},
              {"seed", 4242},
              {"replicates", 2000},
              {"horizon", 1.2},
              {"process",
               {{"type", "pure_migration"},
                {"eta1", 0.8},
                {"eta2", 0.5},
                {"n1", 4},
                {"n2", 3}}}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("version and battery listing") {
    const auto v = run_cli("--version");
    CHECK(v.code == 0);
    CHECK(v.output.find(ptproc::kVersion) != std::string::npos);

    const auto ls = run_cli("list-batteries");
    CHECK(ls.code == 0);
    for (const char* name :
         {"skellam-decomposition", "death-migration-multinomial",
          "pure-migration", "bd-difference", "mean-covariance",
          "fractional-migration"})
      CHECK(ls.output.find(name) != std::string::npos);

    const auto tpl = run_cli("list-batteries --templates");
    CHECK(tpl.code == 0);
    std::istringstream lines(tpl.output);
    std::string line;
    int parsed = 0;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] != '{') continue;
      const json j = json::parse(line);
      CHECK(j.at("schema_version") == 1);
      CHECK(j.at("kind") == "validate");
      ++parsed;
    }
    CHECK(parsed == 6);
  }

  TEST_CASE("simulate: deterministic outputs, seed and thread independence") {
    const auto cfg = write_config("sim.json", migration_config("simulate"));
    const auto out_a = scratch_root() / "sim-a";
    const auto out_b = scratch_root() / "sim-b";
    const auto out_c = scratch_root() / "sim-c";
    const auto out_d = scratch_root() / "sim-d";

    const auto a = run_cli("simulate --config '" + cfg.string() + "' --out '" +
                           out_a.string() + "' --threads 1");
    const auto b = run_cli("simulate --config '" + cfg.string() + "' --out '" +
                           out_b.string() + "' --threads 4");
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    const std::string csv_a = read_file(out_a / "results.csv");
    CHECK(!csv_a.empty());
    CHECK(csv_a == read_file(out_b / "results.csv"));  // thread count moot

    const auto c = run_cli("simulate --config '" + cfg.string() + "' --out '" +
                           out_c.string() + "'");
    CHECK(c.code == 0);
    CHECK(csv_a == read_file(out_c / "results.csv"));  // reruns identical

    const auto d = run_cli("simulate --config '" + cfg.string() +
                           "' --seed 999 --out '" + out_d.string() + "'");
    CHECK(d.code == 0);
    CHECK(csv_a != read_file(out_d / "results.csv"));  // seed matters

    const json manifest = json::parse(read_file(out_a / "manifest.json"));
    CHECK(manifest.at("tool") == "ptproc");
    CHECK(manifest.at("kind") == "simulate");
    CHECK(manifest.at("exit_code") == 0);
    CHECK(manifest.at("seed") == 4242);
    CHECK(manifest.at("config").at("process").at("eta1") == 0.8);
    const json m_d = json::parse(read_file(out_d / "manifest.json"));
    CHECK(m_d.at("seed") == 999);

    // The histogram counts a two-column csv "k,count" summing to the
    // replicate count.
    std::istringstream rows(csv_a);
    std::string line;
    std::getline(rows, line);
    CHECK(line == "k,count");
    long long total = 0;
    while (std::getline(rows, line)) {
      const auto comma = line.find(',');
      REQUIRE(comma != std::string::npos);
      total += std::stoll(line.substr(comma + 1));
    }
    CHECK(total == 2000);
  }

  TEST_CASE("pmf output is a normalized table") {
    const auto cfg = write_config("pmf.json", migration_config("pmf"));
    const auto out = scratch_root() / "pmf-out";
    const auto r =
        run_cli("pmf --config '" + cfg.string() + "' --out '" + out.string() +
                "'");
    CHECK(r.code == 0);
    std::istringstream rows(read_file(out / "results.csv"));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "k,probability");
    double sum = 0.0;
    int nrows = 0;
    while (std::getline(rows, line)) {
      const auto comma = line.find(',');
      REQUIRE(comma != std::string::npos);
      sum += std::stod(line.substr(comma + 1));
      ++nrows;
    }
    CHECK(nrows == 8);  // states 0..7
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }

  TEST_CASE("moments and timechange kinds run end to end") {
    json bdm_cfg{{"schema_version", 1},
                 {"kind", "moments"},
                 {"horizon", 1.5},
                 {"times", {0.3, 0.9, 1.5}},
                 {"process",
                  {{"type", "bdm"},
                   {"lambda1", 0.9},
                   {"mu1", 0.5},
                   {"eta1", 0.09},
                   {"lambda2", 0.6},
                   {"mu2", 0.2},
                   {"eta2", 0.09},
                   {"n1", 3},
                   {"n2", 1}}}};
    const auto cfg = write_config("mom.json", bdm_cfg);
    const auto out = scratch_root() / "mom-out";
    const auto r = run_cli("moments --config '" + cfg.string() + "' --out '" +
                           out.string() + "'");
    CHECK(r.code == 0);
    std::istringstream rows(read_file(out / "results.csv"));
    std::string header;
    std::getline(rows, header);
    CHECK(header ==
          "t,mean1_closed,mean2_closed,mean1_ode,mean2_ode,cross_ode,"
          "fact1_ode,fact2_ode,cross_closed,fact1_closed,fact2_closed");
    // Closed vs ODE means agree row by row.
    std::string line;
    int checked = 0;
    while (std::getline(rows, line)) {
      std::vector<double> cols;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
      REQUIRE(cols.size() == 11);
      CHECK(std::abs(cols[1] - cols[3]) < 1e-7 * (1.0 + std::abs(cols[1])));
      CHECK(std::abs(cols[2] - cols[4]) < 1e-7 * (1.0 + std::abs(cols[2])));
      CHECK(std::abs(cols[5] - cols[8]) < 1e-6 * (1.0 + std::abs(cols[5])));
      ++checked;
    }
    CHECK(checked == 3);

    json tc_cfg = migration_config("timechange");
    tc_cfg["alpha"] = 0.7;
    tc_cfg["horizon"] = 1.0;
    const auto cfg2 = write_config("tc.json", tc_cfg);
    const auto out2 = scratch_root() / "tc-out";
    const auto r2 = run_cli("timechange --config '" + cfg2.string() +
                            "' --out '" + out2.string() + "'");
    CHECK(r2.code == 0);
    const json man = json::parse(read_file(out2 / "manifest.json"));
    CHECK(man.at("run").at("alpha") == 0.7);
    CHECK(man.at("run").at("laplace_fallback") == false);
    std::istringstream rows2(read_file(out2 / "results.csv"));
    std::getline(rows2, line);
    double sum = 0.0;
    while (std::getline(rows2, line))
      sum += std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }

  TEST_CASE("validate battery runs clean") {
    json v_cfg{{"schema_version", 1},
               {"kind", "validate"},
               {"battery", "bd-difference"},
               {"seed", 20260814},
               {"replicates", 20000}};
    const auto cfg = write_config("val.json", v_cfg);
    const auto out = scratch_root() / "val-out";
    const auto r = run_cli("validate --config '" + cfg.string() + "' --out '" +
                           out.string() + "'");
    CHECK(r.code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
    std::istringstream rows(read_file(out / "results.csv"));
    std::string line;
    std::getline(rows, line);
    CHECK(line == "check,metric,value,threshold,pass");
    int n = 0;
    while (std::getline(rows, line)) {
      CHECK(line.substr(line.rfind(',') + 1) == "true");
      ++n;
    }
    CHECK(n >= 2);
  }

  TEST_CASE("usage and configuration errors exit with code 2") {
    CHECK(run_cli("").code == 2);                    // missing subcommand
    CHECK(run_cli("frobnicate").code == 2);          // unknown subcommand
    CHECK(run_cli("pmf").code == 2);                 // missing --config
    CHECK(run_cli("pmf --config /no/such/file.json").code == 2);

    const auto bad_json = scratch_root() / "bad.json";
    std::ofstream(bad_json) << "{ not json";
    CHECK(run_cli("pmf --config '" + bad_json.string() + "'").code == 2);

    auto wrong_version = migration_config("pmf");
    wrong_version["schema_version"] = 2;
    CHECK(run_cli("pmf --config '" +
                  write_config("wv.json", wrong_version).string() + "'")
              .code == 2);

    auto unknown_key = migration_config("pmf");
    unknown_key["surprise"] = true;
    CHECK(run_cli("pmf --config '" +
                  write_config("uk.json", unknown_key).string() + "'")
              .code == 2);

    // Config kind must match the subcommand.
    const auto sim_cfg = write_config("mismatch.json",
                                      migration_config("simulate"));
    CHECK(run_cli("pmf --config '" + sim_cfg.string() + "'").code == 2);

    // Unknown battery name.
    json v_cfg{{"schema_version", 1},
               {"kind", "validate"},
               {"battery", "does-not-exist"}};
    CHECK(run_cli("validate --config '" +
                  write_config("nb.json", v_cfg).string() + "'")
              .code == 2);

    // Bad process parameters surface as configuration errors.
    auto neg = migration_config("pmf");
    neg["process"]["eta1"] = -0.5;
    CHECK(run_cli("pmf --config '" + write_config("neg.json", neg).string() +
                  "'")
              .code == 2);
  }
}
