#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ptproc/experiment.hpp"
#include "ptproc/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ptproc - stochastic process laboratory"};
  app.set_version_flag("--version", ptproc::kVersion);
  app.require_subcommand(1);

  ptproc::experiment::RunOptions opt;
  std::uint64_t seed = 0, replicates = 0;
  bool templates = false;

  auto add_run = [&](const char* name, const char* help,
                     bool needs_config = true) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", opt.config_path,
                                "JSON run configuration");
    if (needs_config) cfg->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--replicates", replicates,
                    "override the config replicate count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--threads", opt.threads,
                    "worker threads (0 = autodetect)");
    return sub;
  };

  CLI::App* simulate =
      add_run("simulate", "Monte Carlo endpoint histogram of a process");
  CLI::App* pmf = add_run("pmf", "closed-form probability table");
  CLI::App* moments = add_run("moments", "closed-form and ODE moments");
  CLI::App* validate =
      add_run("validate", "run a named cross-validation battery");
  CLI::App* timechange =
      add_run("timechange", "fractional (inverse stable clock) law");
  CLI::App* list =
      app.add_subcommand("list-batteries", "list validation batteries");
  list->add_flag("--templates", templates,
                 "also print a config template per battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems exit 2
  }

  if (list->parsed()) {
    for (const auto& b : ptproc::experiment::batteries()) {
      std::cout << b.name << "\t" << b.description << "\n";
      if (templates) std::cout << b.template_config.dump() << "\n";
    }
    return 0;
  }

  for (const CLI::App* sub :
       {simulate, pmf, moments, validate, timechange})
    if (sub->parsed()) {
      opt.kind = sub->get_name();
      if (sub->count("--seed")) opt.seed = seed;
      if (sub->count("--replicates")) opt.replicates = replicates;
      if (!sub->count("--threads")) opt.threads = -1;
      return ptproc::experiment::run(opt, std::cout);
    }
  return 2;
}
