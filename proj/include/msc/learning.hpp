#pragma once

// Losses, the market-aware empirical objective, Adam, and the three
// training procedures (naive, strat, market-aware).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "msc/market_core.hpp"
#include "msc/pricing_smooth.hpp"

namespace msc {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 500;
  std::size_t epochs = 100;
  double lambda_reg = 0.1;
  SmoothPriceConfig smooth;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;            // mean batch objective
  double rho_smooth = 0.0;      // mean smoothed price over market batches
  double val_accuracy = 0.0;    // long-term (MASC) or plain accuracy
  std::size_t no_demand_batches = 0;
  std::size_t clamped_batches = 0;

  bool operator==(const EpochRecord&) const = default;
};

struct ModelState {
  LinearClassifier classifier;
  std::vector<double> adam_m;  // d + 1 entries, tau last
  std::vector<double> adam_v;
  std::size_t step = 0;
  std::vector<EpochRecord> history;
  double train_price = 0.0;  // price the short-term evaluation freezes

  static ModelState init(LinearClassifier h);
  bool operator==(const ModelState&) const = default;
};

double hinge(std::span<const double> x, int y, const LinearClassifier& h);

/// max{0, 1 - y(w.x + tau + 2‖w‖)}
double strategic_hinge(std::span<const double> x, int y,
                       const LinearClassifier& h);

/// max{0, 1 - y(w.x + tau + (b/rho)‖w‖)}, y in {-1,+1}. rho below rho_floor
/// is clamped to it.
double m_hinge(std::span<const double> x, int y, double budget,
               const LinearClassifier& h, double rho,
               double rho_floor = 1e-12);

struct ObjectiveValue {
  double loss = 0.0;
  std::vector<double> grad;  // d + 1 entries, tau last
  double rho_smooth = 0.0;   // 0 when the batch has no demand
  bool no_demand = false;    // fell back to the plain hinge
  bool clamped = false;
};

/// mean m-hinge at the smoothed batch price + lambda ‖w‖², with the exact
/// gradient over (w, tau) including the path through the price.
ObjectiveValue objective(const Dataset& batch, const LinearClassifier& h,
                         const TrainConfig& cfg);

/// mean plain hinge + lambda ‖w‖² and its gradient.
ObjectiveValue hinge_objective(const Dataset& batch, const LinearClassifier& h,
                               const TrainConfig& cfg);

/// Bias-corrected Adam update of (w, tau).
ModelState adam_step(ModelState state, std::span<const double> gradient,
                     const TrainConfig& cfg);

/// Plain hinge classifier trained with mini-batch Adam; ignores budgets.
ModelState train_naive(const Dataset& train, const TrainConfig& cfg);

/// Market-aware training initialized from `init` (defaults to the naive
/// model). Returns the state with the best long-term validation accuracy;
/// the initialization is epoch 0.
ModelState train_masc(const Dataset& train, const Dataset& val,
                      const TrainConfig& cfg);
ModelState train_masc(const Dataset& train, const Dataset& val,
                      const TrainConfig& cfg, const LinearClassifier& init);

/// Default strat threshold grid for weights w: 64 values spanning the
/// negated score range of w.x over `train`, widened by one IQR per side.
std::vector<double> default_tau_grid(const Dataset& train,
                                     std::span<const double> w);

/// w := naive-induced price vector on train, tau := best short-term
/// validation accuracy at that frozen price over the grid (plus the naive
/// tau rescaled to the new weights).
ModelState train_strat(const Dataset& train, const Dataset& val,
                       const TrainConfig& cfg,
                       std::optional<std::vector<double>> tau_grid = {});
ModelState train_strat(const Dataset& train, const Dataset& val,
                       const TrainConfig& cfg, const ModelState& naive,
                       std::optional<std::vector<double>> tau_grid = {});

}  // namespace msc
