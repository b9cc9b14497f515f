#pragma once

// User best responses to posted prices and whole-market simulation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "msc/market_core.hpp"

namespace msc {

struct Bundle {
  std::vector<double> delta;  // feature purchases, >= 0
  double cost = 0.0;
};

/// Cheapest purchase that brings a negatively classified x to the boundary
/// under per-feature prices p: all mass on the feature minimizing p_i/w_i
/// among w_i > 0 (lowest index on ties). Throws InfeasibleResponseError when
/// no w_i > 0, InputError when x is already positive or p has a negative
/// entry.
Bundle least_cost_bundle(const LinearClassifier& h, std::span<const double> x,
                         std::span<const double> prices);

struct Response {
  std::vector<double> post;
  bool moved = false;
  double spend = 0.0;
};

/// Moves x to the boundary along w/‖w‖ iff it is negative and rho*u <= b.
Response best_response(const LinearClassifier& h, std::span<const double> x,
                       double budget, double rho);

enum class MovementMode {
  directional,     // along w/‖w‖, price per Euclidean unit
  single_feature,  // only feature `feature` is bought, price per unit of it
};

struct MarketOutcome {
  std::size_t dim = 0;
  std::vector<double> post_features;  // row-major, n x dim
  std::vector<std::uint8_t> moved;
  std::vector<std::uint8_t> crossed;  // prediction flipped -1 -> +1
  std::vector<double> spend;
  double total_revenue = 0.0;
  MovementMode mode = MovementMode::directional;

  std::size_t size() const noexcept { return spend.size(); }
  std::span<const double> post(std::size_t i) const {
    return {post_features.data() + i * dim, dim};
  }
  std::size_t movers() const;
};

/// Every user best-responds at the shared price rho. Movers land exactly on
/// the boundary and count as crossed.
MarketOutcome simulate_market(const LinearClassifier& h, const Dataset& data,
                              double rho);

/// Demand when users may only buy feature `feature` (requires w_feature > 0):
/// u = max(0, -(w.x + tau)) / w_feature.
DemandProfile single_feature_profile(const LinearClassifier& h,
                                     const Dataset& data, std::size_t feature);

/// Market where movement is restricted to `feature`, priced per unit of it.
MarketOutcome simulate_market_single_feature(const LinearClassifier& h,
                                             const Dataset& data, double rho,
                                             std::size_t feature);

}  // namespace msc
