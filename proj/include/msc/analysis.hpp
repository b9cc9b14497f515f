#pragma once

// Population-level revenue theory, price-setter diagnostics, and the
// sweep/landscape studies built on exact pricing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "msc/market_core.hpp"
#include "msc/pricing_smooth.hpp"

namespace msc {

enum class PdfFamily { beta, uniform, normal, normal_mixture };

/// Demand density on [lo, hi]. Beta is the standard Beta(a, b) mapped
/// affinely onto the support; Normal families are truncated to it.
struct PdfSpec {
  PdfFamily family = PdfFamily::uniform;
  double a = 1.0, b = 1.0;             // Beta shapes
  double mu = 0.0, sigma = 1.0;        // Normal / first mixture component
  double mu2 = 0.0, sigma2 = 1.0;      // second mixture component
  double weight = 0.5;                 // mixture weight of the first
  double lo = 0.0, hi = 1.0;

  static PdfSpec uniform(double lo, double hi);
  static PdfSpec beta(double a, double b, double lo = 0.0, double hi = 1.0);
  static PdfSpec normal(double mu, double sigma, double lo, double hi);
  static PdfSpec mixture(double w, double mu1, double s1, double mu2,
                         double s2, double lo, double hi);

  void validate() const;
  double pdf(double u) const;
  double sample(std::mt19937_64& rng) const;
};

/// Adaptive Simpson on [a, b] with relative tolerance `rel_tol`. Integrand
/// evaluations stay strictly inside the interval.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-8);

/// r(u) = (1/u) * integral_lo^u f(t) t dt. Throws InputError when u is
/// outside the support or u <= 0.
double expected_revenue(const PdfSpec& pdf, double u);

struct Maximizer {
  double u_star = 0.0;
  bool unique = false;  // D(u) = f(u) u is increasing, decreasing or unimodal
};

/// 512-point grid followed by golden-section refinement.
Maximizer expected_maximizer(const PdfSpec& pdf);

/// buyers / size at the exact price. Throws EmptyMarketError.
double price_setter_percentile(const DemandProfile& profile);

struct ThresholdRecord {
  double tau = 0.0;
  double rho = 0.0;
  double accuracy = 0.0;
  double crossed_pos_ratio = 0.0;
  double crossed_neg_ratio = 0.0;
  double setter_percentile = 0.0;  // 0 when nobody demands
  double welfare = 0.0;
  double burden = 0.0;
  std::size_t n_movers = 0;
  double zero_one = 0.0;        // post-market 0-1 loss
  double mhinge_exact = 0.0;    // mean m-hinge at the exact price
  double mhinge_smooth = 0.0;   // mean m-hinge at the smoothed price
};

/// For each tau: h = (w, tau), equilibrate exactly on `data`, simulate, and
/// record metrics and losses. Losses fall back to the plain hinge when the
/// market is empty.
std::vector<ThresholdRecord> threshold_sweep(std::span<const double> w,
                                             const Dataset& data,
                                             std::span<const double> taus,
                                             const SmoothPriceConfig& smooth = {});

struct SensitivityRecord {
  double u0 = 0.0;
  double rho = 0.0;
  std::optional<std::size_t> setter_index;
  bool new_point_sets_price = false;
};

/// Exact price after adding (u0, b0) to `profile`, for each u0. The added
/// point gets origin index profile.source_size.
std::vector<SensitivityRecord> sensitivity_add_point(
    const DemandProfile& profile, std::span<const double> u0_values,
    double b0);

struct ConvergenceRecord {
  std::size_t m = 0;
  double mean_rho = 0.0, sd_rho = 0.0;
  double mean_revenue = 0.0, sd_revenue = 0.0;  // revenue / m
};

/// Monte-Carlo: `trials` samples of size m with unit budgets per m value.
/// Each (m, trial) pair owns a substream derived from `seed`.
std::vector<ConvergenceRecord> convergence_with_m(
    const PdfSpec& pdf, std::span<const std::size_t> m_values,
    std::size_t trials, std::uint64_t seed);

/// Twelve Beta(a, b) shapes covering symmetric, skewed, U-shaped, bell and
/// uniform densities.
std::vector<std::pair<double, double>> default_beta_grid();

/// m draws from `pdf` with unit budgets.
DemandProfile sample_profile(const PdfSpec& pdf, std::size_t m,
                             std::mt19937_64& rng);

// ---------------------------------------------------------------------------

template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol) {
  const double span = b - a;
  if (!(span > 0.0)) return 0.0;
  // t = a + span (3s^2 - 2s^3) flattens integrable endpoint singularities
  auto g = [&](double s) {
    const double dt = 6.0 * s * (1.0 - s) * span;
    if (dt <= 0.0) return 0.0;
    const double t = a + span * s * s * (3.0 - 2.0 * s);
    return t > a && t < b ? f(t) * dt : 0.0;
  };

  // coarse composite estimate fixes the absolute target
  constexpr int kPanels = 64;
  const double h = 1.0 / kPanels;
  std::vector<double> fx(2 * kPanels + 1);
  for (int k = 0; k <= 2 * kPanels; ++k) fx[k] = g(0.5 * h * k);
  double coarse = 0.0;
  for (int k = 0; k < kPanels; ++k)
    coarse += h / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
  const double tol = rel_tol * std::max(std::abs(coarse), 1e-300);

  struct Rec {
    decltype(g)& fn;
    double operator()(double x0, double x2, double f0, double f1, double f2,
                      double whole, double eps, int depth) const {
      const double x1 = 0.5 * (x0 + x2);
      const double fl = fn(0.5 * (x0 + x1)), fr = fn(0.5 * (x1 + x2));
      const double left = (x1 - x0) / 6.0 * (f0 + 4.0 * fl + f1);
      const double right = (x2 - x1) / 6.0 * (f1 + 4.0 * fr + f2);
      const double diff = left + right - whole;
      if (depth <= 0 || std::abs(diff) <= 15.0 * eps)
        return left + right + diff / 15.0;
      return (*this)(x0, x1, f0, fl, f1, left, 0.5 * eps, depth - 1) +
             (*this)(x1, x2, f1, fr, f2, right, 0.5 * eps, depth - 1);
    }
  } rec{g};

  double total = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double x0 = h * k, x2 = x0 + h;
    const double whole = h / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
    total += rec(x0, x2, fx[2 * k], fx[2 * k + 1], fx[2 * k + 2], whole,
                 tol / kPanels, 40);
  }
  return total;
}

}  // namespace msc
