// Serial reference vs OpenMP kernels.  Run: ./bench_kernels --benchmark_filter=respond

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "msc/kernels.hpp"

namespace k = msc::kernels;

namespace {

struct Market {
  std::size_t n, dim;
  std::vector<double> X, budgets, w;
  double tau;
};

Market make_market(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ub(0.5, 5.0);
  Market m{n, dim, std::vector<double>(n * dim), std::vector<double>(n),
           std::vector<double>(dim), -0.5};
  for (auto& v : m.X) v = nd(rng);
  for (auto& v : m.budgets) v = ub(rng);
  for (auto& v : m.w) v = nd(rng);
  return m;
}

template <auto Fn>
void BM_scores(benchmark::State& st) {
  const Market m = make_market(static_cast<std::size_t>(st.range(0)), 16);
  std::vector<double> out(m.n);
  for (auto _ : st) {
    Fn(m.X, m.dim, m.w, m.tau, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void BM_respond(benchmark::State& st) {
  const Market m = make_market(static_cast<std::size_t>(st.range(0)), 16);
  std::vector<double> post(m.X.size()), spend(m.n);
  std::vector<std::uint8_t> moved(m.n);
  for (auto _ : st) {
    Fn(m.X, m.dim, m.budgets, m.w, m.tau, 0.8, post, moved, spend);
    benchmark::DoNotOptimize(post.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <auto Fn>
void BM_softsort(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(1.0, 10.0);
  std::vector<double> values(n), units(n);
  for (auto& v : values) v = ud(rng);
  for (auto& v : units) v = ud(rng);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> P(n * n), uP(n), vP(n);
  for (auto _ : st) {
    Fn(sorted, values, units, 1e-2, P, uP, vP);
    benchmark::DoNotOptimize(P.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

template <auto Fn>
void BM_softsort_backward(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ud(1.0, 10.0);
  std::vector<double> values(n), units(n), g_uP(n), g_vP(n);
  for (auto& v : values) v = ud(rng);
  for (auto& v : units) v = ud(rng);
  for (auto& v : g_uP) v = ud(rng);
  for (auto& v : g_vP) v = ud(rng);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> P(n * n), uP(n), vP(n), scratch(n * n), gs(n), gv(n), gu(n);
  k::serial::softsort_apply(sorted, values, units, 1e-2, P, uP, vP);
  for (auto _ : st) {
    Fn(P, sorted, values, units, 1e-2, g_uP, g_vP, scratch, gs, gv, gu);
    benchmark::DoNotOptimize(gv.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

template <auto Fn>
void BM_revenue_grid(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::mt19937_64 rng(17);
  std::lognormal_distribution<double> ld(0.0, 1.0);
  std::vector<double> ubar(n), prefix(n);
  for (auto& v : ubar) v = ld(rng);
  std::sort(ubar.begin(), ubar.end());
  std::partial_sum(ubar.begin(), ubar.end(), prefix.begin());
  std::vector<double> prices(100000), out(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i)
    prices[i] = 0.01 * std::pow(1.0001, static_cast<double>(i));
  for (auto _ : st) {
    Fn(ubar, prefix, prices, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(prices.size()));
}

}  // namespace

BENCHMARK(BM_scores<k::serial::scores>)->Name("scores/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(BM_scores<k::omp::scores>)->Name("scores/omp")->Range(1 << 10, 1 << 20)->UseRealTime();
BENCHMARK(BM_respond<k::serial::respond>)->Name("respond/serial")->Range(1 << 10, 1 << 20);
BENCHMARK(BM_respond<k::omp::respond>)->Name("respond/omp")->Range(1 << 10, 1 << 20)->UseRealTime();
BENCHMARK(BM_softsort<k::serial::softsort_apply>)->Name("softsort/serial")->RangeMultiplier(2)->Range(64, 1024);
BENCHMARK(BM_softsort<k::omp::softsort_apply>)->Name("softsort/omp")->RangeMultiplier(2)->Range(64, 1024)->UseRealTime();
BENCHMARK(BM_softsort_backward<k::serial::softsort_apply_backward>)->Name("softsort_backward/serial")->RangeMultiplier(2)->Range(64, 1024);
BENCHMARK(BM_softsort_backward<k::omp::softsort_apply_backward>)->Name("softsort_backward/omp")->RangeMultiplier(2)->Range(64, 1024)->UseRealTime();
BENCHMARK(BM_revenue_grid<k::serial::revenue_grid>)->Name("revenue_grid/serial")->Range(1 << 8, 1 << 14);
BENCHMARK(BM_revenue_grid<k::omp::revenue_grid>)->Name("revenue_grid/omp")->Range(1 << 8, 1 << 14)->UseRealTime();

BENCHMARK_MAIN();
