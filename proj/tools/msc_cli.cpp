// msc: command-line front end for pricing, simulation, training and sweeps.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "msc/errors.hpp"
#include "msc/experiment.hpp"
#include "msc/synthetic.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"market-aware strategic classification toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string dataset;
  std::string scenario;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--dataset", dataset, "dataset CSV (overrides config)");
  app.add_option("--scenario", scenario, "synthetic scenario kind (overrides config)");

  const char* names[] = {"price", "simulate", "train", "eval", "sweep", "synth"};
  const char* help[] = {"exact and smoothed market price",
                        "simulate user responses at a price",
                        "naive / strat / market-aware training over random splits",
                        "short- and long-term evaluation of a given classifier",
                        "parameter sweeps",
                        "generate a synthetic dataset or demand profile"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  msc::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = msc::load_config(config_path);
  cfg.command = msc::command_from_string(app.get_subcommands().front()->get_name());
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.out = out_dir;
  if (!dataset.empty()) cfg.dataset = dataset;
  if (!scenario.empty()) {
    const auto kind = msc::scenario_kind_from_string(scenario);
    if (!cfg.scenario || cfg.scenario->kind != kind) {
      cfg.scenario = msc::ScenarioSpec::defaults(kind);
      cfg.scenario_seed_given = false;
    }
  }

  const msc::Report report = msc::run_experiment(cfg);
  msc::write_report(report, cfg.out);
  std::cerr << "wrote " << cfg.out << "/results.jsonl\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const msc::DatasetError& e) {
    std::cerr << "msc: dataset error: " << e.what() << '\n';
    return 2;
  } catch (const msc::InputError& e) {
    std::cerr << "msc: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "msc: internal error: " << e.what() << '\n';
    return 1;
  }
}
