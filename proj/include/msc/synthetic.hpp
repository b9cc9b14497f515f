#pragma once

// Seeded generators for the synthetic markets studied with this toolkit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msc/market_core.hpp"

namespace msc {

enum class ScenarioKind {
  beta_demand,               // DemandProfile: Beta units on [lo, hi]
  gaussian_threshold,        // 1-D: classes rescaled into [-1,0) and (0,1]
  two_feature,               // 2-D: x1 informative, x2 not, b = 1 + 4y
  budget_label_independent,  // 2-D: b driven by x1, y driven by x2
  inverted_gap,              // 1-D: signed class-mean gap, b = b1 * y
  adversarial_equal_revenue, // DemandProfile: every candidate i > 1 ties
};

enum class BudgetRule { uniform, power };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

/// Parameters of every generator; `defaults(kind)` fills the values the
/// corresponding construction is usually run with.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::beta_demand;
  double mu = 1.0;      // class mean magnitude
  double sigma = 0.15;  // class-conditional standard deviation
  double beta_a = 1.0, beta_b = 1.0;
  double lo = 1.0, hi = 10.0;
  double p1 = 0.5;  // P(y = 1)
  BudgetRule budget_rule = BudgetRule::uniform;
  double alpha = 0.0;  // power budgets b = u^-alpha
  double b_min = 1.0, b_max = 5.0;
  double b1 = 1.0;    // inverted gap: b = b1 * y
  double gap = 1.0;   // inverted gap: mu1 - mu0
  double sigma_aux = 0.4;      // budget/label independent: sd of x1
  double budget_slope = 2.5;   // budget/label independent
  double budget_noise = 0.2;
  double budget_floor = 0.1;
  std::size_t m = 1000;
  std::uint64_t seed = 0;

  static ScenarioSpec defaults(ScenarioKind kind);
  /// Throws InputError unless sigma > 0, a > 0, b > 0, lo < hi,
  /// p1 in (0,1), m >= 1.
  void validate() const;
};

/// b_i = u_i^-alpha. Throws InputError for non-positive units.
std::vector<double> power_budgets(std::span<const double> units, double alpha);

/// m Beta(a, b) draws min-max rescaled to [lo, hi]; budgets per rule.
DemandProfile beta_demand(const ScenarioSpec& spec);

/// Returns the dataset and a one-line description.
std::pair<Dataset, std::string> gaussian_threshold_scenario(
    const ScenarioSpec& spec);

Dataset two_feature_scenario(const ScenarioSpec& spec);

/// u_1 = 1, u_2 = 2, u_i = 2 * sum_{j<i} u_j, unit budgets. Throws for m < 3.
DemandProfile adversarial_equal_revenue(std::size_t m);

Dataset budget_label_independent_scenario(const ScenarioSpec& spec);

/// Zero budgets for negatives: those users can never buy.
Dataset inverted_gap_scenario(const ScenarioSpec& spec);

/// Dataset-valued scenarios by kind; throws InputError for profile kinds.
Dataset generate_dataset(const ScenarioSpec& spec);

/// Affine map of `values` onto [lo, hi] (min -> lo, max -> hi). A single or
/// constant sample maps to the midpoint.
std::vector<double> rescale_to(std::span<const double> values, double lo,
                               double hi);

}  // namespace msc
