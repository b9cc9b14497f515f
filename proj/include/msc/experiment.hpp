#pragma once

// Experiment configuration (JSON), orchestration, and report emission.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msc/analysis.hpp"
#include "msc/learning.hpp"
#include "msc/market_core.hpp"
#include "msc/response.hpp"
#include "msc/synthetic.hpp"

namespace msc {

enum class Command { price, simulate, train, eval, sweep, synth };
enum class SweepKind { alpha, tau, cluster, beta_grid, convergence, sensitivity };

std::string_view to_string(Command c);
std::string_view to_string(SweepKind k);
Command command_from_string(std::string_view name);
SweepKind sweep_kind_from_string(std::string_view name);

struct SplitFractions {
  double train = 0.7, val = 0.1, test = 0.2;
};

struct SweepConfig {
  SweepKind kind = SweepKind::alpha;
  std::vector<double> values;  // alpha, tau, class-mean or u0 values
  std::vector<double> taus;    // cluster: thresholds per scenario
  std::vector<std::pair<double, double>> beta_grid = default_beta_grid();
  std::vector<std::size_t> m_values{100, 1000, 10000};
  std::size_t m = 2000;
  std::size_t trials = 50;
  double b0 = 1.0;
  PdfSpec pdf = PdfSpec::beta(0.5, 4.0, 1.0, 10.0);
};

struct ExperimentConfig {
  Command command = Command::train;
  std::optional<std::string> dataset;  // CSV path
  std::optional<std::string> profile;  // units,budget CSV (price only)
  bool allow_negative_features = false;
  std::optional<ScenarioSpec> scenario;
  bool scenario_seed_given = false;  // otherwise the scenario uses `seed`
  TrainConfig train;
  std::optional<double> alpha;
  SplitFractions split;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::string out = "results";
  std::optional<LinearClassifier> classifier;
  std::optional<double> rho;  // frozen price for simulate / eval
  MovementMode movement = MovementMode::directional;
  std::size_t feature = 0;
  SweepConfig sweep;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses a JSON document; unknown keys, wrong types and invalid values
/// throw ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config as compact JSON.
std::string config_to_json(const ExperimentConfig& cfg);

struct Report {
  std::string jsonl;  // first line is the resolved config
  std::string csv;    // aggregates (or the flat table for single-run sweeps)
  std::vector<std::pair<std::string, std::string>> files;  // extra artifacts
};

/// Executes cfg.command. Deterministic for a fixed config.
Report run_experiment(const ExperimentConfig& cfg);

/// results.jsonl, aggregates.csv and any extra artifacts into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

/// Random train/val/test split of `data` for repetition `rep`.
std::array<Dataset, 3> split_dataset(const Dataset& data,
                                     const SplitFractions& f,
                                     std::uint64_t seed, std::size_t rep);

}  // namespace msc
