#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "config.hpp"
#include "studies.hpp"

using namespace dynslip;
using namespace dynslip::cli;

int main(int argc, char** argv) {
  CLI::App app{"dynslip: Stokes resolvent and evolution studies with dynamic slip"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> level_override;

  for (Study s : {Study::resolvent, Study::sweep, Study::korn, Study::evolve, Study::maxreg, Study::convergence,
                  Study::interp}) {
    auto* sub = app.add_subcommand(to_string(s), fmt::format("run the {} study", to_string(s)));
    sub->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "global seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--level-override", level_override, "rescale the mesh ladder so its finest h is H")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kFailure;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    cfg.study = *parse_study(name);
    if (out) cfg.output_dir = *out;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (level_override && !cfg.h_levels.empty()) {
      const double scale = *level_override / cfg.h_levels.back();
      for (double& h : cfg.h_levels) h *= scale;
    }
    const int code = run(cfg);
    if (code == kFlagged) std::cerr << "completed with flags (see manifest.json)\n";
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
