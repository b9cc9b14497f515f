#include "msc/pricing_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msc/errors.hpp"
#include "msc/kernels.hpp"

namespace msc {

namespace {

// Relative slack under which two candidate revenues count as tied.
constexpr double kTieTolerance = 1e-12;

std::vector<std::size_t> sorted_order(const DemandProfile& profile) {
  std::vector<std::size_t> order(profile.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto& pa = profile.points[a];
                     const auto& pb = profile.points[b];
                     if (pa.normalized != pb.normalized)
                       return pa.normalized < pb.normalized;
                     return pa.origin_index < pb.origin_index;
                   });
  return order;
}

struct SortedDemand {
  std::vector<std::size_t> order;
  std::vector<double> ubar;    // ascending
  std::vector<double> prefix;  // running units in that order
};

SortedDemand sort_demand(const DemandProfile& profile) {
  SortedDemand s;
  s.order = sorted_order(profile);
  s.ubar.reserve(s.order.size());
  s.prefix.reserve(s.order.size());
  double acc = 0.0;
  for (std::size_t k : s.order) {
    s.ubar.push_back(profile.points[k].normalized);
    acc += profile.points[k].units;
    s.prefix.push_back(acc);
  }
  return s;
}

// Revenue of each candidate in sorted order. Tied ubar values share the
// revenue of the whole tie group since they all buy at that price.
std::vector<double> candidate_revenues(const SortedDemand& s) {
  const std::size_t m = s.ubar.size();
  std::vector<double> rev(m);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && s.ubar[j + 1] == s.ubar[i]) ++j;
    // U / ubar rather than (1/ubar) * U: one rounding instead of two
    const double r = s.prefix[j] / s.ubar[i];
    for (std::size_t k = i; k <= j; ++k) rev[k] = r;
    i = j + 1;
  }
  return rev;
}

}  // namespace

double candidate_price(double ubar) {
  double rho = 1.0 / ubar;
  while (rho > 0.0 && 1.0 / rho < ubar) rho = std::nextafter(rho, 0.0);
  return rho;
}

double revenue_at(double rho, const DemandProfile& profile) {
  if (!(rho > 0.0) || profile.empty()) return 0.0;
  const SortedDemand s = sort_demand(profile);
  double out = 0.0;
  kernels::serial::revenue_grid(s.ubar, s.prefix, std::span(&rho, 1),
                                std::span(&out, 1));
  return out;
}

std::vector<std::size_t> buyer_set(double rho, const DemandProfile& profile) {
  std::vector<std::size_t> out;
  for (const auto& p : profile.points)
    if (affordable(rho, p.units, p.budget)) out.push_back(p.origin_index);
  std::sort(out.begin(), out.end());
  return out;
}

PriceQuote exact_price(const DemandProfile& profile) {
  PriceQuote q;
  if (profile.empty()) return q;
  const SortedDemand s = sort_demand(profile);
  const std::vector<double> rev = candidate_revenues(s);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rev.size(); ++i)
    if (rev[i] > rev[best] * (1.0 + kTieTolerance)) best = i;
  q.rho = candidate_price(s.ubar[best]);
  q.setter_index = profile.points[s.order[best]].origin_index;
  const auto last = std::upper_bound(s.ubar.begin(), s.ubar.end(), 1.0 / q.rho);
  q.buyers = static_cast<std::size_t>(last - s.ubar.begin());
  q.revenue = q.buyers == 0 ? 0.0 : q.rho * s.prefix[q.buyers - 1];
  return q;
}

RevenueCurve revenue_curve(const DemandProfile& profile) {
  RevenueCurve c;
  if (profile.empty()) return c;
  const SortedDemand s = sort_demand(profile);
  const std::vector<double> rev = candidate_revenues(s);
  c.candidates.reserve(rev.size());
  for (std::size_t k = 0; k < rev.size(); ++k)
    c.candidates.push_back({candidate_price(s.ubar[k]), rev[k],
                            profile.points[s.order[k]].origin_index});
  return c;
}

std::vector<double> price_vector(double rho, std::span<const double> w) {
  double n = 0.0;
  for (double v : w) n += v * v;
  n = std::sqrt(n);
  if (!(n > 0.0)) throw DegenerateClassifierError("classifier has w = 0");
  std::vector<double> p(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) p[k] = rho * (w[k] / n);
  return p;
}

PriceQuote brute_force_price(const DemandProfile& profile, std::size_t grid) {
  PriceQuote q;
  if (profile.empty()) return q;
  const SortedDemand s = sort_demand(profile);
  std::vector<double> prices;
  prices.reserve(grid + s.ubar.size());
  const double hi = 1.0 / s.ubar.front();
  const double lo = 1.0 / s.ubar.back();
  const double a = std::log(lo * 0.5), b = std::log(hi * 2.0);
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = grid > 1 ? static_cast<double>(k) / (grid - 1) : 0.0;
    prices.push_back(std::exp(a + t * (b - a)));
  }
  for (double u : s.ubar) prices.push_back(candidate_price(u));
  std::vector<double> rev(prices.size());
  kernels::omp::revenue_grid(s.ubar, s.prefix, prices, rev);
  std::size_t best = 0;
  for (std::size_t k = 1; k < prices.size(); ++k)
    if (rev[k] > rev[best] ||
        (rev[k] == rev[best] && prices[k] > prices[best]))
      best = k;
  q.rho = prices[best];
  q.revenue = rev[best];
  const auto last = std::upper_bound(s.ubar.begin(), s.ubar.end(), 1.0 / q.rho);
  q.buyers = static_cast<std::size_t>(last - s.ubar.begin());
  if (q.buyers > 0)
    q.setter_index = profile.points[s.order[q.buyers - 1]].origin_index;
  return q;
}

}  // namespace msc
