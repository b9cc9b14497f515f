#pragma once

// Data-parallel inner loops. Each kernel exists twice with the same
// signature: `serial::` is the plain reference kept for tests and benchmarks,
// `omp::` is the OpenMP version the library calls. Both compute every output
// element with the same arithmetic in the same order, so results are
// bit-identical for any thread count.

#include <cstddef>
#include <cstdint>
#include <span>

namespace msc::kernels {

namespace serial {

/// out[i] = w . x_i + tau, X row-major (n x dim).
void scores(std::span<const double> X, std::size_t dim,
            std::span<const double> w, double tau, std::span<double> out);

/// Market best response of every user at a shared scalar price.
void respond(std::span<const double> X, std::size_t dim,
             std::span<const double> budgets, std::span<const double> w,
             double tau, double rho, std::span<double> post,
             std::span<std::uint8_t> moved, std::span<double> spend);

/// P_ij = softmax_j(-|sorted_i - values_j| / temp); uP = P units, vP = P values.
void softsort_apply(std::span<const double> sorted,
                    std::span<const double> values,
                    std::span<const double> units, double temp,
                    std::span<double> P, std::span<double> uP,
                    std::span<double> vP);

/// Reverse pass of softsort_apply. `scratch` holds n*n doubles. Outputs are
/// overwritten.
void softsort_apply_backward(std::span<const double> P,
                             std::span<const double> sorted,
                             std::span<const double> values,
                             std::span<const double> units, double temp,
                             std::span<const double> g_uP,
                             std::span<const double> g_vP,
                             std::span<double> scratch,
                             std::span<double> g_sorted,
                             std::span<double> g_values,
                             std::span<double> g_units);

/// Revenue at each price. `sorted_ubar` ascending, `prefix_units[k]` is the
/// total units of the first k+1 entries in that order.
void revenue_grid(std::span<const double> sorted_ubar,
                  std::span<const double> prefix_units,
                  std::span<const double> prices, std::span<double> out);

}  // namespace serial

namespace omp {

void scores(std::span<const double> X, std::size_t dim,
            std::span<const double> w, double tau, std::span<double> out);

void respond(std::span<const double> X, std::size_t dim,
             std::span<const double> budgets, std::span<const double> w,
             double tau, double rho, std::span<double> post,
             std::span<std::uint8_t> moved, std::span<double> spend);

void softsort_apply(std::span<const double> sorted,
                    std::span<const double> values,
                    std::span<const double> units, double temp,
                    std::span<double> P, std::span<double> uP,
                    std::span<double> vP);

void softsort_apply_backward(std::span<const double> P,
                             std::span<const double> sorted,
                             std::span<const double> values,
                             std::span<const double> units, double temp,
                             std::span<const double> g_uP,
                             std::span<const double> g_vP,
                             std::span<double> scratch,
                             std::span<double> g_sorted,
                             std::span<double> g_values,
                             std::span<double> g_units);

void revenue_grid(std::span<const double> sorted_ubar,
                  std::span<const double> prefix_units,
                  std::span<const double> prices, std::span<double> out);

}  // namespace omp

/// Threads the omp kernels will use (1 when built without OpenMP).
int max_threads();

}  // namespace msc::kernels
