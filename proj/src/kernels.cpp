#include "msc/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "msc/market_core.hpp"

namespace msc::kernels {

namespace {

inline double dot_row(const double* x, const double* w, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) acc += w[k] * x[k];
  return acc;
}

inline double norm2(std::span<const double> w) {
  double acc = 0.0;
  for (double v : w) acc += v * v;
  return std::sqrt(acc);
}

// One user's response. Shared by both kernel flavours so the arithmetic is
// identical by construction.
inline void respond_one(const double* x, std::size_t dim, double budget,
                        const double* w, double wnorm, double tau, double rho,
                        double* post, std::uint8_t& moved, double& spend) {
  const double s = dot_row(x, w, dim) + tau;
  std::copy(x, x + dim, post);
  moved = 0;
  spend = 0.0;
  if (s >= 0.0) return;
  const double units = -s / wnorm;
  if (!affordable(rho, units, budget)) return;
  double step = units / wnorm;
  for (std::size_t k = 0; k < dim; ++k) post[k] = x[k] + step * w[k];
  // rounding can leave the projection a hair short of the boundary
  for (int it = 0; it < 16; ++it) {
    const double s2 = dot_row(post, w, dim) + tau;
    if (s2 >= 0.0) break;
    step += std::max(-s2 / (wnorm * wnorm), step * 0x1p-52);
    for (std::size_t k = 0; k < dim; ++k) post[k] = x[k] + step * w[k];
  }
  moved = 1;
  spend = std::min(rho * units, budget);
}

inline void softsort_row(std::size_t i, std::span<const double> sorted,
                         std::span<const double> values,
                         std::span<const double> units, double inv_temp,
                         double* row, double& uP, double& vP) {
  const std::size_t n = values.size();
  const double si = sorted[i];
  // The row maximum of -|s_i - v_j| is 0 (s_i is one of the v_j).
  double z = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] = std::exp(-std::abs(si - values[j]) * inv_temp);
    z += row[j];
  }
  double au = 0.0, av = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    row[j] /= z;
    au += row[j] * units[j];
    av += row[j] * values[j];
  }
  uP = au;
  vP = av;
}

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Row pass of the backward kernel: writes B_ij = dL/dA_ij * dA_ij/dv_j into
// `brow` and returns dL/dsorted_i.
inline double softsort_backward_row(std::size_t i, const double* prow,
                                    std::span<const double> sorted,
                                    std::span<const double> values,
                                    std::span<const double> units,
                                    double inv_temp, double g_u, double g_v,
                                    double* brow) {
  const std::size_t n = values.size();
  double dot = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    dot += prow[j] * (g_u * units[j] + g_v * values[j]);
  double g_s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double gp = g_u * units[j] + g_v * values[j];
    const double ga = prow[j] * (gp - dot);
    // A_ij = -|s_i - v_j| / T
    const double b = ga * sgn(sorted[i] - values[j]) * inv_temp;
    brow[j] = b;
    g_s -= b;
  }
  return g_s;
}

inline void softsort_backward_col(std::size_t j, std::size_t n,
                                  std::span<const double> P,
                                  std::span<const double> scratch,
                                  std::span<const double> g_uP,
                                  std::span<const double> g_vP, double& g_v,
                                  double& g_u) {
  double av = 0.0, au = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = P[i * n + j];
    av += scratch[i * n + j] + p * g_vP[i];
    au += p * g_uP[i];
  }
  g_v = av;
  g_u = au;
}

inline double revenue_one(std::span<const double> sorted_ubar,
                          std::span<const double> prefix_units, double price) {
  if (!(price > 0.0)) return 0.0;
  const double limit = 1.0 / price;
  // buyers are exactly the prefix with ubar <= 1/price
  const auto it =
      std::upper_bound(sorted_ubar.begin(), sorted_ubar.end(), limit);
  const auto k = static_cast<std::size_t>(it - sorted_ubar.begin());
  return k == 0 ? 0.0 : price * prefix_units[k - 1];
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// ---------------------------------------------------------------------------
// serial reference

namespace serial {

void scores(std::span<const double> X, std::size_t dim,
            std::span<const double> w, double tau, std::span<double> out) {
  assert(X.size() == out.size() * dim);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = dot_row(X.data() + i * dim, w.data(), dim) + tau;
}

void respond(std::span<const double> X, std::size_t dim,
             std::span<const double> budgets, std::span<const double> w,
             double tau, double rho, std::span<double> post,
             std::span<std::uint8_t> moved, std::span<double> spend) {
  const double wn = norm2(w);
  for (std::size_t i = 0; i < budgets.size(); ++i)
    respond_one(X.data() + i * dim, dim, budgets[i], w.data(), wn, tau, rho,
                post.data() + i * dim, moved[i], spend[i]);
}

void softsort_apply(std::span<const double> sorted,
                    std::span<const double> values,
                    std::span<const double> units, double temp,
                    std::span<double> P, std::span<double> uP,
                    std::span<double> vP) {
  const std::size_t n = values.size();
  const double inv_t = 1.0 / temp;
  for (std::size_t i = 0; i < n; ++i)
    softsort_row(i, sorted, values, units, inv_t, P.data() + i * n, uP[i],
                 vP[i]);
}

void softsort_apply_backward(std::span<const double> P,
                             std::span<const double> sorted,
                             std::span<const double> values,
                             std::span<const double> units, double temp,
                             std::span<const double> g_uP,
                             std::span<const double> g_vP,
                             std::span<double> scratch,
                             std::span<double> g_sorted,
                             std::span<double> g_values,
                             std::span<double> g_units) {
  const std::size_t n = values.size();
  const double inv_t = 1.0 / temp;
  for (std::size_t i = 0; i < n; ++i)
    g_sorted[i] =
        softsort_backward_row(i, P.data() + i * n, sorted, values, units,
                              inv_t, g_uP[i], g_vP[i], scratch.data() + i * n);
  for (std::size_t j = 0; j < n; ++j)
    softsort_backward_col(j, n, P, scratch, g_uP, g_vP, g_values[j],
                          g_units[j]);
}

void revenue_grid(std::span<const double> sorted_ubar,
                  std::span<const double> prefix_units,
                  std::span<const double> prices, std::span<double> out) {
  for (std::size_t k = 0; k < prices.size(); ++k)
    out[k] = revenue_one(sorted_ubar, prefix_units, prices[k]);
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP

namespace omp {

namespace {
// Below this many elements the fork/join overhead dominates.
constexpr std::ptrdiff_t kMinParallel = 256;
}  // namespace

void scores(std::span<const double> X, std::size_t dim,
            std::span<const double> w, double tau, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = dot_row(X.data() + i * dim, w.data(), dim) + tau;
}

void respond(std::span<const double> X, std::size_t dim,
             std::span<const double> budgets, std::span<const double> w,
             double tau, double rho, std::span<double> post,
             std::span<std::uint8_t> moved, std::span<double> spend) {
  const double wn = norm2(w);
  const auto n = static_cast<std::ptrdiff_t>(budgets.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    respond_one(X.data() + i * dim, dim, budgets[i], w.data(), wn, tau, rho,
                post.data() + i * dim, moved[i], spend[i]);
}

void softsort_apply(std::span<const double> sorted,
                    std::span<const double> values,
                    std::span<const double> units, double temp,
                    std::span<double> P, std::span<double> uP,
                    std::span<double> vP) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const double inv_t = 1.0 / temp;
  // rows are O(n) each; parallelize once the matrix is non-trivial
#pragma omp parallel for schedule(static) if (n * n >= kMinParallel * 64)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    softsort_row(static_cast<std::size_t>(i), sorted, values, units, inv_t,
                 P.data() + i * n, uP[i], vP[i]);
}

void softsort_apply_backward(std::span<const double> P,
                             std::span<const double> sorted,
                             std::span<const double> values,
                             std::span<const double> units, double temp,
                             std::span<const double> g_uP,
                             std::span<const double> g_vP,
                             std::span<double> scratch,
                             std::span<double> g_sorted,
                             std::span<double> g_values,
                             std::span<double> g_units) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const double inv_t = 1.0 / temp;
  const bool par = n * n >= kMinParallel * 64;
#pragma omp parallel if (par)
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      g_sorted[i] = softsort_backward_row(
          static_cast<std::size_t>(i), P.data() + i * n, sorted, values,
          units, inv_t, g_uP[i], g_vP[i], scratch.data() + i * n);
    // implicit barrier: every scratch row is complete before column sums
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j)
      softsort_backward_col(static_cast<std::size_t>(j),
                            static_cast<std::size_t>(n), P, scratch, g_uP,
                            g_vP, g_values[j], g_units[j]);
  }
}

void revenue_grid(std::span<const double> sorted_ubar,
                  std::span<const double> prefix_units,
                  std::span<const double> prices, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(prices.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    out[k] = revenue_one(sorted_ubar, prefix_units, prices[k]);
}

}  // namespace omp

}  // namespace msc::kernels
