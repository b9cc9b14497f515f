#include "msc/pricing_smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msc/errors.hpp"
#include "msc/kernels.hpp"

namespace msc {

void SmoothPriceConfig::validate() const {
  if (!(temp_softsort > 0.0) || !(temp_softmax > 0.0))
    throw InputError("smoothing temperatures must be > 0");
  if (!(rho_floor > 0.0)) throw InputError("rho_floor must be > 0");
}

std::vector<double> soft_sort(std::span<const double> values, double temp) {
  if (values.empty()) throw InputError("soft_sort of an empty vector");
  if (!(temp > 0.0)) throw InputError("soft_sort temperature must be > 0");
  const std::size_t n = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> P(n * n), a(n), b(n);
  kernels::omp::softsort_apply(sorted, values, values, temp, P, a, b);
  return P;
}

namespace {

// Forward state kept for the reverse pass.
struct Tape {
  std::size_t n = 0;
  std::vector<double> units, budgets, ubar, v, sorted;
  std::vector<std::size_t> perm;  // sorted[i] = v[perm[i]]
  std::size_t argmin = 0;
  double gamma = 0.0, total_units = 0.0;
  std::vector<double> P, uP, vP, z, c, r, q;
  double rho_norm = 0.0, rho = 0.0;
  bool clamped = false;
};

Tape forward(const DemandProfile& profile, const SmoothPriceConfig& cfg) {
  cfg.validate();
  if (profile.empty())
    throw EmptyMarketError("smoothed price of an empty market");
  Tape t;
  const std::size_t n = t.n = profile.size();
  t.units.resize(n);
  t.budgets.resize(n);
  t.ubar.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    t.units[j] = profile.points[j].units;
    t.budgets[j] = profile.points[j].budget;
    t.ubar[j] = t.units[j] / t.budgets[j];
  }
  t.argmin = static_cast<std::size_t>(
      std::min_element(t.ubar.begin(), t.ubar.end()) - t.ubar.begin());
  t.gamma = t.ubar[t.argmin];
  t.v.resize(n);
  for (std::size_t j = 0; j < n; ++j) t.v[j] = t.ubar[j] / t.gamma;

  t.perm.resize(n);
  std::iota(t.perm.begin(), t.perm.end(), std::size_t{0});
  std::stable_sort(t.perm.begin(), t.perm.end(),
                   [&](std::size_t a, std::size_t b) { return t.v[a] < t.v[b]; });
  t.sorted.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.sorted[i] = t.v[t.perm[i]];

  t.P.resize(n * n);
  t.uP.resize(n);
  t.vP.resize(n);
  kernels::omp::softsort_apply(t.sorted, t.v, t.units, cfg.temp_softsort, t.P,
                               t.uP, t.vP);

  t.total_units = std::accumulate(t.units.begin(), t.units.end(), 0.0);
  t.z.resize(n);
  t.c.resize(n);
  t.r.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.z[i] = 1.0 / t.vP[i];
    acc += t.uP[i];
    t.c[i] = acc;
    t.r[i] = t.z[i] * t.c[i] / t.total_units;
  }

  t.q.resize(n);
  const double rmax = *std::max_element(t.r.begin(), t.r.end());
  double zsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.q[i] = std::exp((t.r[i] - rmax) / cfg.temp_softmax);
    zsum += t.q[i];
  }
  t.rho_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.q[i] /= zsum;
    t.rho_norm += t.z[i] * t.q[i];
  }
  t.rho = t.rho_norm / t.gamma;
  if (!(t.rho >= cfg.rho_floor)) {
    t.rho = cfg.rho_floor;
    t.clamped = true;
  }
  return t;
}

}  // namespace

SmoothPriceResult smooth_price(const DemandProfile& profile,
                               const SmoothPriceConfig& cfg) {
  const Tape t = forward(profile, cfg);
  return {t.rho, t.clamped, {}, {}};
}

SmoothPriceResult smooth_price_gradient(const DemandProfile& profile,
                                        const SmoothPriceConfig& cfg) {
  const Tape t = forward(profile, cfg);
  const std::size_t n = t.n;
  SmoothPriceResult out{t.rho, t.clamped, std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0)};
  if (t.clamped) return out;

  // rho = rho_norm / gamma, rho_norm = z . q
  double g_gamma = -t.rho_norm / (t.gamma * t.gamma);
  std::vector<double> g_z(n), g_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    g_z[i] = t.q[i] / t.gamma;
    g_q[i] = t.z[i] / t.gamma;
  }
  // q = softmax(r / T)
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) sq += t.q[i] * g_q[i];
  std::vector<double> g_r(n);
  for (std::size_t i = 0; i < n; ++i)
    g_r[i] = t.q[i] * (g_q[i] - sq) / cfg.temp_softmax;
  // r = z * c / C
  std::vector<double> g_c(n);
  double g_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g_z[i] += g_r[i] * t.c[i] / t.total_units;
    g_c[i] = g_r[i] * t.z[i] / t.total_units;
    g_total -= g_r[i] * t.r[i] / t.total_units;
  }
  // c = cumsum(uP), z = 1 / vP
  std::vector<double> g_uP(n), g_vP(n);
  double tail = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    tail += g_c[k];
    g_uP[k] = tail;
  }
  for (std::size_t i = 0; i < n; ++i) g_vP[i] = -g_z[i] * t.z[i] * t.z[i];

  std::vector<double> scratch(n * n), g_sorted(n), g_v(n), g_u(n);
  kernels::omp::softsort_apply_backward(t.P, t.sorted, t.v, t.units,
                                        cfg.temp_softsort, g_uP, g_vP, scratch,
                                        g_sorted, g_v, g_u);
  for (std::size_t i = 0; i < n; ++i) g_v[t.perm[i]] += g_sorted[i];

  // v = ubar / gamma, gamma = min ubar, ubar = u / b
  std::vector<double> g_ubar(n);
  for (std::size_t j = 0; j < n; ++j) {
    g_ubar[j] = g_v[j] / t.gamma;
    g_gamma -= g_v[j] * t.v[j] / t.gamma;
  }
  g_ubar[t.argmin] += g_gamma;
  for (std::size_t j = 0; j < n; ++j) {
    out.d_rho_d_units[j] = g_u[j] + g_total + g_ubar[j] / t.budgets[j];
    out.d_rho_d_budgets[j] = -g_ubar[j] * t.ubar[j] / t.budgets[j];
  }
  return out;
}

}  // namespace msc
