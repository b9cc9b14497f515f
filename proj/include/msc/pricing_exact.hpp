#pragma once

// Exact revenue-maximizing prices for one-dimensional demand.
//
// Revenue at price rho is rho times the units bought by every user who can
// afford their demand (u/b <= 1/rho). Revenue is piecewise linear in rho and
// drops right after each candidate 1/ubar_i, so the maximum is attained at
// one of the candidates; a single ascending scan over ubar finds it.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "msc/market_core.hpp"

namespace msc {

struct PriceQuote {
  double rho = 0.0;
  std::optional<std::size_t> setter_index;  // origin index of the setter
  double revenue = 0.0;
  std::size_t buyers = 0;
};

struct RevenueCandidate {
  double price = 0.0;
  double revenue = 0.0;
  std::size_t origin_index = 0;
};

/// One candidate per demand point, ascending in normalized demand.
struct RevenueCurve {
  std::vector<RevenueCandidate> candidates;
};

/// rho * (units of all users with ubar <= 1/rho). Zero for rho <= 0.
double revenue_at(double rho, const DemandProfile& profile);

/// Largest price at which a user with normalized demand `ubar` still buys.
/// Equal to 1/ubar up to one ulp; chosen so that affordable() accepts the
/// user exactly at that price.
double candidate_price(double ubar);

/// Revenue-maximizing price. Ties between candidates with equal revenue keep
/// the highest price. Empty profile: rho = 0, revenue 0, no setter.
PriceQuote exact_price(const DemandProfile& profile);

RevenueCurve revenue_curve(const DemandProfile& profile);

/// p = rho * w / ‖w‖. Throws DegenerateClassifierError.
std::vector<double> price_vector(double rho, std::span<const double> w);

/// Verification oracle: maximizes revenue_at over a geometric grid of
/// `grid` prices spanning the candidates, plus the candidates themselves.
PriceQuote brute_force_price(const DemandProfile& profile,
                             std::size_t grid = 100000);

/// Buyers (origin indices) at price rho, ascending.
std::vector<std::size_t> buyer_set(double rho, const DemandProfile& profile);

}  // namespace msc
