#include "msc/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msc/errors.hpp"
#include "msc/kernels.hpp"

namespace msc {

Bundle least_cost_bundle(const LinearClassifier& h, std::span<const double> x,
                         std::span<const double> prices) {
  if (prices.size() != h.dim())
    throw DimensionMismatchError("price vector dimension mismatch");
  for (double p : prices)
    if (!(p >= 0.0)) throw InputError("prices must be non-negative");
  const double s = h.score(x);
  if (s >= 0.0) throw InputError("user is already classified positive");
  const double kappa = -s;

  std::size_t best = h.dim();
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.dim(); ++i) {
    if (!(h.w[i] > 0.0)) continue;
    const double ratio = prices[i] / h.w[i];
    if (best == h.dim() || ratio < best_ratio) {
      best = i;
      best_ratio = ratio;
    }
  }
  if (best == h.dim())
    throw InfeasibleResponseError("no feature with positive weight to buy");
  Bundle out;
  out.delta.assign(h.dim(), 0.0);
  out.delta[best] = kappa / h.w[best];
  out.cost = prices[best] * out.delta[best];
  return out;
}

Response best_response(const LinearClassifier& h, std::span<const double> x,
                       double budget, double rho) {
  const double wn = h.norm();
  if (!(wn > 0.0)) throw DegenerateClassifierError("classifier has w = 0");
  if (x.size() != h.dim())
    throw DimensionMismatchError("feature vector dimension mismatch");
  Response r;
  r.post.resize(x.size());
  std::uint8_t moved = 0;
  kernels::serial::respond(x, x.size(), std::span(&budget, 1), h.w, h.tau, rho,
                           r.post, std::span(&moved, 1),
                           std::span(&r.spend, 1));
  r.moved = moved != 0;
  return r;
}

std::size_t MarketOutcome::movers() const {
  return static_cast<std::size_t>(std::count(moved.begin(), moved.end(), 1));
}

namespace {

MarketOutcome empty_outcome(const Dataset& data, MovementMode mode) {
  MarketOutcome out;
  out.dim = data.dim();
  out.post_features.resize(data.size() * data.dim());
  out.moved.assign(data.size(), 0);
  out.spend.assign(data.size(), 0.0);
  out.mode = mode;
  return out;
}

void finish(MarketOutcome& out) {
  out.crossed = out.moved;
  double total = 0.0;
  for (double s : out.spend) total += s;
  out.total_revenue = total;
}

}  // namespace

MarketOutcome simulate_market(const LinearClassifier& h, const Dataset& data,
                              double rho) {
  if (!(h.norm() > 0.0))
    throw DegenerateClassifierError("classifier has w = 0");
  if (!data.empty() && data.dim() != h.dim())
    throw DimensionMismatchError("dataset and classifier dimensions differ");
  MarketOutcome out = empty_outcome(data, MovementMode::directional);
  kernels::omp::respond(data.feature_matrix(), data.dim(), data.budgets(),
                        h.w, h.tau, rho, out.post_features, out.moved,
                        out.spend);
  finish(out);
  return out;
}

DemandProfile single_feature_profile(const LinearClassifier& h,
                                     const Dataset& data,
                                     std::size_t feature) {
  if (feature >= h.dim() || !(h.w[feature] > 0.0))
    throw InfeasibleResponseError("single-feature market needs w_j > 0");
  std::vector<double> units(data.size()), budgets(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = h.score(data.features(i));
    units[i] = s >= 0.0 ? 0.0 : -s / h.w[feature];
    budgets[i] = data.budget(i);
  }
  return make_profile(units, budgets);
}

MarketOutcome simulate_market_single_feature(const LinearClassifier& h,
                                             const Dataset& data, double rho,
                                             std::size_t feature) {
  if (feature >= h.dim() || !(h.w[feature] > 0.0))
    throw InfeasibleResponseError("single-feature market needs w_j > 0");
  MarketOutcome out = empty_outcome(data, MovementMode::single_feature);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    std::copy(x.begin(), x.end(), out.post_features.begin() + i * data.dim());
    const double s = h.score(x);
    if (s >= 0.0) continue;
    const double units = -s / h.w[feature];
    if (!affordable(rho, units, data.budget(i))) continue;
    out.post_features[i * data.dim() + feature] += units;
    out.moved[i] = 1;
    out.spend[i] = std::min(rho * units, data.budget(i));
  }
  finish(out);
  return out;
}

}  // namespace msc
