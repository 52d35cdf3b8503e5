// bvgopt: command-line front end for the experiment harness.

#include "bvg/harness/config.hpp"
#include "bvg/harness/experiment.hpp"
#include "bvg/testbed.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
// Anything else (a numerical failure inside an algorithm) exits with 1.

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config_path, "Experiment config (JSON)")->required();
  sub->add_option("--out", c.out_dir, "Output directory (overrides the config)");
  sub->add_option("--seed-override", c.seed_override, "Run only this seed");
  sub->add_flag("--quiet", c.quiet, "Suppress progress output");
}

bvg::harness::ExperimentConfig load(const Common& c) {
  auto cfg = bvg::harness::load_config(c.config_path);
  if (c.seed_override) cfg.seeds = {*c.seed_override};
  return cfg;
}

bvg::harness::RunOptions options(const Common& c) {
  bvg::harness::RunOptions o;
  o.out_dir = c.out_dir;
  o.quiet = c.quiet;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonsmooth first-order optimization experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BVG_VERSION));

  Common run_c, depth_c, const_c;
  CLI::App* run = app.add_subcommand("run", "Run an algorithm for every seed");
  add_common(run, run_c);
  CLI::App* depth = app.add_subcommand("depth-compare", "Sequential rounds of smoothed AGD+ vs the subgradient method");
  add_common(depth, depth_c);
  CLI::App* consts = app.add_subcommand("estimate-constants", "Monte Carlo BVG constants on a radius grid");
  add_common(consts, const_c);
  CLI::App* list = app.add_subcommand("list-functions", "List catalog functions and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& e : bvg::list_functions()) {
        std::cout << e.name << "(" << e.params << ")  " << e.description << "\n";
      }
      return kExitOk;
    }
    if (*run) {
      const auto rep = bvg::harness::run_experiment(load(run_c), options(run_c));
      if (!run_c.quiet) std::cout << "wrote " << rep.out_dir.string() << "\n";
    } else if (*depth) {
      const auto cfg = load(depth_c);
      const auto rep = bvg::harness::run_depth_comparison(cfg, options(depth_c));
      if (!depth_c.quiet) std::cout << "wrote " << rep.out_dir.string() << "\n";
    } else if (*consts) {
      const auto rep = bvg::harness::run_estimate_constants(load(const_c), options(const_c));
      if (!const_c.quiet) std::cout << "wrote " << rep.out_dir.string() << "\n";
    }
  } catch (const bvg::harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const bvg::harness::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
