#include "msc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "msc/errors.hpp"

namespace msc {

namespace {

// Gap kept at the open ends of [-1, 0) and (0, 1].
constexpr double kOpenEnd = 1e-9;

double beta_draw(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

std::vector<int> draw_labels(std::mt19937_64& rng, std::size_t m, double p1) {
  std::bernoulli_distribution coin(p1);
  std::vector<int> labels(m);
  for (auto& l : labels) l = coin(rng) ? 1 : 0;
  return labels;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::beta_demand: return "beta_demand";
    case ScenarioKind::gaussian_threshold: return "gaussian_threshold";
    case ScenarioKind::two_feature: return "two_feature";
    case ScenarioKind::budget_label_independent:
      return "budget_label_independent";
    case ScenarioKind::inverted_gap: return "inverted_gap";
    case ScenarioKind::adversarial_equal_revenue:
      return "adversarial_equal_revenue";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  for (auto k : {ScenarioKind::beta_demand, ScenarioKind::gaussian_threshold,
                 ScenarioKind::two_feature,
                 ScenarioKind::budget_label_independent,
                 ScenarioKind::inverted_gap,
                 ScenarioKind::adversarial_equal_revenue})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown scenario kind '" + std::string(name) + "'");
}

ScenarioSpec ScenarioSpec::defaults(ScenarioKind kind) {
  ScenarioSpec s;
  s.kind = kind;
  switch (kind) {
    case ScenarioKind::beta_demand:
      s.lo = 1.0;
      s.hi = 10.0;
      break;
    case ScenarioKind::gaussian_threshold:
      s.mu = 1.0;
      s.sigma = 0.15;
      s.p1 = 0.5;
      s.b_min = 1.0;
      s.b_max = 5.0;
      s.m = 4000;
      break;
    case ScenarioKind::two_feature:
      s.mu = 1.0;
      s.sigma = 0.15;
      s.p1 = 0.25;
      s.m = 4000;
      break;
    case ScenarioKind::budget_label_independent:
      s.mu = 1.0;
      s.sigma = 0.3;
      s.sigma_aux = 0.4;
      s.p1 = 0.25;
      s.m = 5000;
      break;
    case ScenarioKind::inverted_gap:
      s.sigma = 0.15;
      s.p1 = 0.3;
      s.b1 = 1.0;
      s.gap = -0.5;
      break;
    case ScenarioKind::adversarial_equal_revenue:
      s.m = 10;
      break;
  }
  return s;
}

void ScenarioSpec::validate() const {
  if (!(sigma > 0.0)) throw InputError("sigma must be > 0");
  if (!(beta_a > 0.0) || !(beta_b > 0.0))
    throw InputError("Beta shapes must be > 0");
  if (!(lo < hi)) throw InputError("scaling interval needs lo < hi");
  if (!(p1 > 0.0 && p1 < 1.0)) throw InputError("p1 must lie in (0,1)");
  if (m < 1) throw InputError("sample size must be >= 1");
  if (!(alpha >= 0.0)) throw InputError("alpha must be >= 0");
  if (!(sigma_aux > 0.0)) throw InputError("sigma_aux must be > 0");
}

std::vector<double> rescale_to(std::span<const double> values, double lo,
                               double hi) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto [mn, mx] = std::minmax_element(out.begin(), out.end());
  const double a = *mn, b = *mx;
  if (!(b > a)) {
    std::fill(out.begin(), out.end(), 0.5 * (lo + hi));
    return out;
  }
  for (double& v : out) v = lo + (v - a) / (b - a) * (hi - lo);
  // pin the endpoints exactly
  out[static_cast<std::size_t>(mn - out.begin())] = lo;
  out[static_cast<std::size_t>(mx - out.begin())] = hi;
  return out;
}

std::vector<double> power_budgets(std::span<const double> units,
                                  double alpha) {
  std::vector<double> b(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!(units[i] > 0.0)) throw InputError("power budgets need units > 0");
    b[i] = std::pow(units[i], -alpha);
  }
  return b;
}

DemandProfile beta_demand(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<double> raw(spec.m);
  for (double& v : raw) v = beta_draw(rng, spec.beta_a, spec.beta_b);
  const std::vector<double> units = rescale_to(raw, spec.lo, spec.hi);
  std::vector<double> budgets(units.size(), 1.0);
  if (spec.budget_rule == BudgetRule::power) {
    // units at exactly 0 (lo = 0) carry no demand; give them a unit budget
    for (std::size_t i = 0; i < units.size(); ++i)
      budgets[i] = units[i] > 0.0 ? std::pow(units[i], -spec.alpha) : 1.0;
  }
  return make_profile(units, budgets);
}

std::pair<Dataset, std::string> gaussian_threshold_scenario(
    const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::vector<int> labels = draw_labels(rng, spec.m, spec.p1);
  std::normal_distribution<double> neg(-spec.mu, spec.sigma),
      pos(spec.mu, spec.sigma);
  std::vector<double> raw(spec.m), zneg, zpos;
  for (std::size_t i = 0; i < spec.m; ++i) {
    raw[i] = labels[i] == 1 ? pos(rng) : neg(rng);
    (labels[i] == 1 ? zpos : zneg).push_back(raw[i]);
  }
  zneg = rescale_to(zneg, -1.0, -kOpenEnd);
  zpos = rescale_to(zpos, kOpenEnd, 1.0);
  Dataset data(1);
  std::size_t in = 0, ip = 0;
  for (std::size_t i = 0; i < spec.m; ++i) {
    const double z = labels[i] == 1 ? zpos[ip++] : zneg[in++];
    const double b =
        spec.b_min + (z + 1.0) * 0.5 * (spec.b_max - spec.b_min);
    data.add(std::span(&z, 1), b, labels[i]);
  }
  std::string desc = "gaussian_threshold: m=" + std::to_string(spec.m) +
                     " p1=" + std::to_string(spec.p1) +
                     " budgets linear in z from " + std::to_string(spec.b_min) +
                     " to " + std::to_string(spec.b_max);
  return {std::move(data), std::move(desc)};
}

Dataset two_feature_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::vector<int> labels = draw_labels(rng, spec.m, spec.p1);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  Dataset data(2);
  for (std::size_t i = 0; i < spec.m; ++i) {
    const double x1 = spec.mu * signed_label(labels[i]) + noise(rng);
    const double x2 = noise(rng);
    const double x[2] = {x1, x2};
    data.add(x, 1.0 + 4.0 * labels[i], labels[i]);
  }
  return data;
}

DemandProfile adversarial_equal_revenue(std::size_t m) {
  if (m < 3) throw InputError("adversarial construction needs m >= 3");
  std::vector<double> units{1.0, 2.0};
  double total = 3.0;
  while (units.size() < m) {
    const double next = units[1] * total;
    units.push_back(next);
    total += next;
  }
  const std::vector<double> budgets(m, 1.0);
  return make_profile(units, budgets);
}

Dataset budget_label_independent_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::vector<int> labels = draw_labels(rng, spec.m, spec.p1);
  std::normal_distribution<double> x1d(0.0, spec.sigma_aux),
      x2d(0.0, spec.sigma), eps(0.0, spec.budget_noise);
  Dataset data(2);
  for (std::size_t i = 0; i < spec.m; ++i) {
    const double x1 = x1d(rng);
    const double x2 = spec.mu * signed_label(labels[i]) + x2d(rng);
    const double b =
        std::max(spec.budget_floor, spec.budget_slope * x1 + eps(rng));
    const double x[2] = {x1, x2};
    data.add(x, b, labels[i]);
  }
  return data;
}

Dataset inverted_gap_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::vector<int> labels = draw_labels(rng, spec.m, spec.p1);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  Dataset data(1);
  for (std::size_t i = 0; i < spec.m; ++i) {
    const double mean = labels[i] == 1 ? 0.5 * spec.gap : -0.5 * spec.gap;
    const double x = mean + noise(rng);
    data.add(std::span(&x, 1), spec.b1 * labels[i], labels[i]);
  }
  return data;
}

Dataset generate_dataset(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::gaussian_threshold:
      return gaussian_threshold_scenario(spec).first;
    case ScenarioKind::two_feature: return two_feature_scenario(spec);
    case ScenarioKind::budget_label_independent:
      return budget_label_independent_scenario(spec);
    case ScenarioKind::inverted_gap: return inverted_gap_scenario(spec);
    default:
      throw InputError("scenario '" + std::string(to_string(spec.kind)) +
                       "' produces a demand profile, not a dataset");
  }
}

}  // namespace msc
