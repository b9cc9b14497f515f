#include "msc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msc/errors.hpp"
#include "msc/evaluation.hpp"
#include "msc/learning.hpp"
#include "msc/pricing_exact.hpp"

namespace msc {
namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double norm_pdf(double z) {
  static const double k = 1.0 / std::sqrt(2.0 * std::acos(-1.0));
  return k * std::exp(-0.5 * z * z);
}

double normal_mass(double mu, double sigma, double lo, double hi) {
  return norm_cdf((hi - mu) / sigma) - norm_cdf((lo - mu) / sigma);
}

double draw_beta(double a, double b, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x / (x + y);
}

double draw_truncated(double mu, double sigma, double lo, double hi,
                      std::mt19937_64& rng) {
  std::normal_distribution<double> nd(mu, sigma);
  for (int tries = 0; tries < 1000000; ++tries) {
    const double v = nd(rng);
    if (v >= lo && v <= hi) return v;
  }
  throw InputError("truncated normal: support carries negligible mass");
}

}  // namespace

PdfSpec PdfSpec::uniform(double lo, double hi) {
  PdfSpec p;
  p.family = PdfFamily::uniform;
  p.lo = lo;
  p.hi = hi;
  return p;
}

PdfSpec PdfSpec::beta(double a, double b, double lo, double hi) {
  PdfSpec p;
  p.family = PdfFamily::beta;
  p.a = a;
  p.b = b;
  p.lo = lo;
  p.hi = hi;
  return p;
}

PdfSpec PdfSpec::normal(double mu, double sigma, double lo, double hi) {
  PdfSpec p;
  p.family = PdfFamily::normal;
  p.mu = mu;
  p.sigma = sigma;
  p.lo = lo;
  p.hi = hi;
  return p;
}

PdfSpec PdfSpec::mixture(double w, double mu1, double s1, double mu2,
                         double s2, double lo, double hi) {
  PdfSpec p;
  p.family = PdfFamily::normal_mixture;
  p.weight = w;
  p.mu = mu1;
  p.sigma = s1;
  p.mu2 = mu2;
  p.sigma2 = s2;
  p.lo = lo;
  p.hi = hi;
  return p;
}

void PdfSpec::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw InputError("pdf support must satisfy lo < hi");
  switch (family) {
    case PdfFamily::beta:
      if (!(a > 0.0) || !(b > 0.0)) throw InputError("beta shapes must be > 0");
      break;
    case PdfFamily::uniform:
      break;
    case PdfFamily::normal:
      if (!(sigma > 0.0)) throw InputError("normal sigma must be > 0");
      break;
    case PdfFamily::normal_mixture:
      if (!(sigma > 0.0) || !(sigma2 > 0.0))
        throw InputError("mixture sigmas must be > 0");
      if (!(weight >= 0.0 && weight <= 1.0))
        throw InputError("mixture weight must lie in [0,1]");
      break;
  }
}

double PdfSpec::pdf(double u) const {
  if (u < lo || u > hi) return 0.0;
  const double span = hi - lo;
  switch (family) {
    case PdfFamily::uniform:
      return 1.0 / span;
    case PdfFamily::beta: {
      const double t = (u - lo) / span;
      const double lb = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
      if ((t <= 0.0 && a < 1.0) || (t >= 1.0 && b < 1.0))
        return std::numeric_limits<double>::infinity();
      if (t <= 0.0) return a == 1.0 ? std::exp(-lb) / span : 0.0;
      if (t >= 1.0) return b == 1.0 ? std::exp(-lb) / span : 0.0;
      return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - lb) /
             span;
    }
    case PdfFamily::normal:
      return norm_pdf((u - mu) / sigma) / sigma / normal_mass(mu, sigma, lo, hi);
    case PdfFamily::normal_mixture: {
      const double mass = weight * normal_mass(mu, sigma, lo, hi) +
                          (1.0 - weight) * normal_mass(mu2, sigma2, lo, hi);
      const double dens = weight * norm_pdf((u - mu) / sigma) / sigma +
                          (1.0 - weight) * norm_pdf((u - mu2) / sigma2) / sigma2;
      return dens / mass;
    }
  }
  return 0.0;
}

double PdfSpec::sample(std::mt19937_64& rng) const {
  switch (family) {
    case PdfFamily::uniform:
      return std::uniform_real_distribution<double>(lo, hi)(rng);
    case PdfFamily::beta:
      return lo + (hi - lo) * draw_beta(a, b, rng);
    case PdfFamily::normal:
      return draw_truncated(mu, sigma, lo, hi, rng);
    case PdfFamily::normal_mixture: {
      // rejection from the untruncated mixture keeps the joint truncation
      std::bernoulli_distribution pick(weight);
      std::normal_distribution<double> n1(mu, sigma), n2(mu2, sigma2);
      for (int tries = 0; tries < 1000000; ++tries) {
        const double v = pick(rng) ? n1(rng) : n2(rng);
        if (v >= lo && v <= hi) return v;
      }
      throw InputError("mixture: support carries negligible mass");
    }
  }
  return lo;
}

double expected_revenue(const PdfSpec& pdf, double u) {
  pdf.validate();
  if (!(u > 0.0)) throw InputError("expected_revenue requires u > 0");
  if (u < pdf.lo || u > pdf.hi)
    throw InputError("expected_revenue: u outside the pdf support");
  if (u == pdf.lo) return 0.0;
  const double integral =
      adaptive_simpson([&](double t) { return pdf.pdf(t) * t; }, pdf.lo, u);
  return integral / u;
}

Maximizer expected_maximizer(const PdfSpec& pdf) {
  pdf.validate();
  constexpr int kGrid = 512;
  const double lo = std::max(pdf.lo, 0.0), hi = pdf.hi;
  if (!(hi > 0.0)) throw InputError("expected_maximizer: support must reach u > 0");
  const double step = (hi - lo) / kGrid;
  auto integrand = [&](double t) { return pdf.pdf(t) * t; };

  // cumulative integral grid; r(u_k) = I_k / u_k
  std::vector<double> u(kGrid + 1), r(kGrid + 1, 0.0);
  double acc = 0.0;
  u[0] = lo;
  for (int k = 1; k <= kGrid; ++k) {
    u[k] = k == kGrid ? hi : lo + step * k;
    acc += adaptive_simpson(integrand, u[k - 1], u[k]);
    r[k] = acc / u[k];
  }
  int best = 1;
  for (int k = 2; k <= kGrid; ++k)
    if (r[k] > r[best]) best = k;

  double a = u[best - 1], b = u[std::min(best + 1, kGrid)];
  double u_star = u[best];
  if (b > a) {
    auto rev = [&](double x) { return expected_revenue(pdf, std::max(x, 1e-300)); };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = rev(c), fd = rev(d);
    for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
      if (fc < fd) {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = rev(d);
      } else {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = rev(c);
      }
    }
    const double mid = 0.5 * (a + b);
    const double fmid = rev(mid);
    u_star = fmid >= r[best] ? mid : u[best];
    if (best == kGrid && r[kGrid] >= fmid) u_star = hi;
  }

  // D(u) = f(u) u on cell midpoints; signs of differences must read +...+-...-
  std::vector<double> D(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    const double m = lo + step * (k + 0.5);
    D[k] = pdf.pdf(m) * m;
  }
  bool unique = true, descending = false;
  for (int k = 1; k < kGrid; ++k) {
    const double diff = D[k] - D[k - 1];
    const double scale = std::max(std::abs(D[k]), std::abs(D[k - 1]));
    if (std::abs(diff) <= 1e-12 * scale) continue;
    if (diff < 0.0) {
      descending = true;
    } else if (descending) {
      unique = false;
      break;
    }
  }
  return {u_star, unique};
}

double price_setter_percentile(const DemandProfile& profile) {
  if (profile.points.empty())
    throw EmptyMarketError("price_setter_percentile: empty profile");
  const PriceQuote q = exact_price(profile);
  return static_cast<double>(q.buyers) / static_cast<double>(profile.points.size());
}

std::vector<ThresholdRecord> threshold_sweep(std::span<const double> w,
                                             const Dataset& data,
                                             std::span<const double> taus,
                                             const SmoothPriceConfig& smooth) {
  if (taus.empty()) throw InputError("threshold_sweep: empty tau list");
  if (w.size() != data.dim())
    throw DimensionMismatchError("threshold_sweep: weight dimension mismatch");
  smooth.validate();
  std::vector<ThresholdRecord> out(taus.size());
  const auto n = static_cast<std::ptrdiff_t>(taus.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    LinearClassifier h{std::vector<double>(w.begin(), w.end()), taus[t]};
    ThresholdRecord& rec = out[t];
    rec.tau = h.tau;
    const DemandProfile profile = demand_profile(h, data);
    double rho_s = 0.0;
    if (!profile.points.empty()) {
      const PriceQuote q = exact_price(profile);
      rec.rho = q.rho;
      rec.setter_percentile =
          static_cast<double>(q.buyers) / static_cast<double>(profile.points.size());
      rho_s = smooth_price(profile, smooth).rho_smooth;
    }
    const Metrics m = evaluate(h, data, rec.rho);
    rec.accuracy = m.accuracy;
    rec.crossed_pos_ratio = m.crossed_pos_ratio;
    rec.crossed_neg_ratio = m.crossed_neg_ratio;
    rec.welfare = m.welfare;
    rec.burden = m.burden;
    rec.n_movers = m.n_movers;
    rec.zero_one = 1.0 - m.accuracy;

    double le = 0.0, ls = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (profile.points.empty()) {
        const double v = hinge(data.features(i), data.y(i), h);
        le += v;
        ls += v;
      } else {
        le += m_hinge(data.features(i), data.y(i), data.budget(i), h, rec.rho,
                      smooth.rho_floor);
        ls += m_hinge(data.features(i), data.y(i), data.budget(i), h, rho_s,
                      smooth.rho_floor);
      }
    }
    const double nd = static_cast<double>(std::max<std::size_t>(data.size(), 1));
    rec.mhinge_exact = le / nd;
    rec.mhinge_smooth = ls / nd;
  }
  return out;
}

std::vector<SensitivityRecord> sensitivity_add_point(
    const DemandProfile& profile, std::span<const double> u0_values,
    double b0) {
  if (profile.points.empty())
    throw EmptyMarketError("sensitivity_add_point: empty base profile");
  if (!(b0 > 0.0)) throw InputError("sensitivity_add_point: b0 must be > 0");
  std::vector<SensitivityRecord> out;
  out.reserve(u0_values.size());
  for (double u0 : u0_values) {
    if (!(u0 > 0.0) || !std::isfinite(u0))
      throw InputError("sensitivity_add_point: u0 must be finite and > 0");
    DemandProfile p = profile;
    p.points.push_back({u0, b0, u0 / b0, profile.source_size});
    p.source_size = profile.source_size + 1;
    const PriceQuote q = exact_price(p);
    out.push_back({u0, q.rho, q.setter_index,
                   q.setter_index && *q.setter_index == profile.source_size});
  }
  return out;
}

std::vector<std::pair<double, double>> default_beta_grid() {
  return {{0.5, 0.5}, {1.0, 1.0}, {2.0, 2.0}, {5.0, 5.0},
          {0.5, 2.0}, {2.0, 0.5}, {1.0, 3.0}, {3.0, 1.0},
          {2.0, 5.0}, {5.0, 2.0}, {0.5, 4.0}, {4.0, 0.5}};
}

DemandProfile sample_profile(const PdfSpec& pdf, std::size_t m,
                             std::mt19937_64& rng) {
  std::vector<double> units(m), budgets(m, 1.0);
  for (auto& u : units) u = pdf.sample(rng);
  return make_profile(units, budgets);
}

std::vector<ConvergenceRecord> convergence_with_m(
    const PdfSpec& pdf, std::span<const std::size_t> m_values,
    std::size_t trials, std::uint64_t seed) {
  pdf.validate();
  if (trials == 0) throw InputError("convergence_with_m: trials must be > 0");
  std::vector<ConvergenceRecord> out;
  for (std::size_t m : m_values) {
    if (m == 0) throw InputError("convergence_with_m: m must be > 0");
    std::vector<double> rho(trials), rev(trials);
    const auto nt = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < nt; ++t) {
      std::seed_seq sq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(m),
                       static_cast<std::uint32_t>(t)};
      std::mt19937_64 rng(sq);
      const DemandProfile p = sample_profile(pdf, m, rng);
      if (p.points.empty()) {
        rho[t] = 0.0;
        rev[t] = 0.0;
        continue;
      }
      const PriceQuote q = exact_price(p);
      rho[t] = q.rho;
      rev[t] = q.revenue / static_cast<double>(m);
    }
    auto moments = [](const std::vector<double>& v) {
      const double n = static_cast<double>(v.size());
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return std::pair{mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
    };
    const auto [mr, sr] = moments(rho);
    const auto [mv, sv] = moments(rev);
    out.push_back({m, mr, sr, mv, sv});
  }
  return out;
}

}  // namespace msc
