#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "ucb/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_override;
  int workers = 0;
  long long seed_override = -1;
};

int run_kind(ucb::ExperimentKind kind, const CommonOpts& opts) {
  ucb::ExperimentConfig cfg;
  try {
    if (!opts.config_path.empty())
      cfg = ucb::parse_config_file(opts.config_path, kind);
    else
      cfg.kind = kind;
    if (kind == ucb::ExperimentKind::InterpNorms && opts.config_path.empty()) {
      cfg.Nr = 33;
      cfg.Ntheta = 64;
    }
    if (!opts.out_override.empty()) cfg.out_dir = opts.out_override;
    if (opts.workers > 0) cfg.workers = opts.workers;
    if (opts.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed_override);
  } catch (const ucb::InvalidConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }

  try {
    const ucb::ExperimentReport rep = ucb::run_and_write(cfg);
    for (const auto& [k, v] : rep.summary)
      std::printf("%s: %s\n", k.c_str(), v.c_str());
    std::printf("%s: %s (%.2f s), reports in %s\n", rep.kind.c_str(),
                rep.pass ? "PASS" : "FAIL", rep.wall_seconds, cfg.out_dir.c_str());
    return rep.pass ? 0 : 2;
  } catch (const ucb::InvalidConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "experiment failed: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical testbench for quantitative unique continuation"};
  app.require_subcommand(1);

  CommonOpts opts;
  const std::vector<std::pair<std::string, ucb::ExperimentKind>> kinds = {
      {"validate-weight", ucb::ExperimentKind::ValidateWeight},
      {"carleman-sweep", ucb::ExperimentKind::CarlemanSweep},
      {"stability-run", ucb::ExperimentKind::StabilityRun},
      {"stokes-check", ucb::ExperimentKind::StokesCheck},
      {"interp-norms", ucb::ExperimentKind::InterpNorms},
      {"suite", ucb::ExperimentKind::Suite},
  };

  ucb::ExperimentKind selected = ucb::ExperimentKind::Suite;
  for (const auto& [name, kind] : kinds) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opts.config_path, "key = value config file");
    sub->add_option("--out", opts.out_override, "output directory (overrides config)");
    sub->add_option("--workers", opts.workers, "worker threads for sweep cells");
    sub->add_option("--seed-override", opts.seed_override, "replace the config seed");
    const ucb::ExperimentKind k = kind;
    sub->callback([&selected, k] { selected = k; });
  }

  CLI11_PARSE(app, argc, argv);
  return run_kind(selected, opts);
}
