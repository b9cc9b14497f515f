#pragma once

// Differentiable surrogate of the exact price.
//
// The exact scan (sort by normalized demand, running unit totals, argmax of
// revenue) is relaxed by replacing the sort with a row-softmax relaxation
// and the argmax with a softmax. Normalized demand is divided by its minimum
// before the relaxation and candidate revenues are expressed as shares of
// total units, so both temperatures act on the same scale for every batch
// and the result satisfies rho(alpha*u) = rho(u)/alpha, rho(alpha*b) =
// alpha*rho(b).

#include <cstddef>
#include <span>
#include <vector>

#include "msc/market_core.hpp"

namespace msc {

struct SmoothPriceConfig {
  double temp_softsort = 1e-3;
  double temp_softmax = 1e-2;
  double rho_floor = 1e-12;

  void validate() const;
};

struct SmoothPriceResult {
  double rho_smooth = 0.0;
  bool clamped = false;                 // rho hit rho_floor
  std::vector<double> d_rho_d_units;    // per profile point
  std::vector<double> d_rho_d_budgets;  // per profile point
};

/// Row-stochastic n x n matrix (row-major); row i softly selects the i-th
/// smallest entry of `values`. Throws InputError on empty input or
/// temp <= 0.
std::vector<double> soft_sort(std::span<const double> values, double temp);

/// Smoothed price only; gradient vectors are left empty.
/// Throws EmptyMarketError for an empty profile.
SmoothPriceResult smooth_price(const DemandProfile& profile,
                               const SmoothPriceConfig& cfg);

/// Smoothed price plus exact partials of the implemented computation.
SmoothPriceResult smooth_price_gradient(const DemandProfile& profile,
                                        const SmoothPriceConfig& cfg);

}  // namespace msc
