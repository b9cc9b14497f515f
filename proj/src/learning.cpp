#include "msc/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "msc/errors.hpp"
#include "msc/evaluation.hpp"
#include "msc/kernels.hpp"
#include "msc/pricing_exact.hpp"

namespace msc {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (!(lambda_reg >= 0.0)) throw ConfigError("lambda_reg must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_epsilon > 0.0))
    throw ConfigError("invalid Adam constants");
  smooth.validate();
}

ModelState ModelState::init(LinearClassifier h) {
  ModelState s;
  const std::size_t p = h.dim() + 1;
  s.classifier = std::move(h);
  s.adam_m.assign(p, 0.0);
  s.adam_v.assign(p, 0.0);
  return s;
}

double hinge(std::span<const double> x, int y, const LinearClassifier& h) {
  return std::max(0.0, 1.0 - y * h.score(x));
}

double strategic_hinge(std::span<const double> x, int y,
                       const LinearClassifier& h) {
  return std::max(0.0, 1.0 - y * (h.score(x) + 2.0 * h.norm()));
}

double m_hinge(std::span<const double> x, int y, double budget,
               const LinearClassifier& h, double rho, double rho_floor) {
  const double r = std::max(rho, rho_floor);
  return std::max(0.0, 1.0 - y * (h.score(x) + (budget / r) * h.norm()));
}

namespace {

// Shared core of both objectives. `shift_i` = (b_i/rho)‖w‖ when a market
// price is in play, 0 otherwise.
ObjectiveValue hinge_core(const Dataset& batch, const LinearClassifier& h,
                          const TrainConfig& cfg, bool use_market) {
  if (batch.empty()) throw InputError("objective of an empty batch");
  if (batch.dim() != h.dim())
    throw DimensionMismatchError("batch and classifier dimensions differ");
  const std::size_t n = batch.size(), d = h.dim();
  const double wn = h.norm();
  std::vector<double> s(n);
  kernels::omp::scores(batch.feature_matrix(), d, h.w, h.tau, s);

  ObjectiveValue out;
  out.grad.assign(d + 1, 0.0);

  DemandProfile profile;
  SmoothPriceResult price;
  bool market = false;
  if (use_market && wn > 0.0) {
    profile = demand_profile(h, batch);
    if (!profile.empty()) {
      price = smooth_price_gradient(profile, cfg.smooth);
      market = true;
      out.rho_smooth = price.rho_smooth;
      out.clamped = price.clamped;
    }
  }
  out.no_demand = use_market && !market;
  const double rho = market ? price.rho_smooth : 0.0;

  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  double g_rho = 0.0;  // d loss / d rho
  for (std::size_t i = 0; i < n; ++i) {
    const double b = batch.budget(i);
    const double shift = market ? (b / rho) * wn : 0.0;
    const int y = batch.y(i);
    const double margin = y * (s[i] + shift);
    if (margin >= 1.0) continue;
    total += 1.0 - margin;
    const double a = -y * inv_n;
    const auto x = batch.features(i);
    for (std::size_t k = 0; k < d; ++k) out.grad[k] += a * x[k];
    out.grad[d] += a;
    if (market && wn > 0.0) {
      const double c = a * (b / rho) / wn;
      for (std::size_t k = 0; k < d; ++k) out.grad[k] += c * h.w[k];
      g_rho += a * (-b * wn / (rho * rho));
    }
  }
  out.loss = total * inv_n;

  if (market && !price.clamped && g_rho != 0.0) {
    // rho depends on (w, tau) through u_j = -s_j/‖w‖ of every demand point
    const double wn3 = wn * wn * wn;
    for (std::size_t j = 0; j < profile.size(); ++j) {
      const auto& pt = profile.points[j];
      const double gu = g_rho * price.d_rho_d_units[j];
      const auto x = batch.features(pt.origin_index);
      const double sj = s[pt.origin_index];
      for (std::size_t k = 0; k < d; ++k)
        out.grad[k] += gu * (-x[k] / wn + sj * h.w[k] / wn3);
      out.grad[d] += gu * (-1.0 / wn);
    }
  }

  double reg = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    reg += h.w[k] * h.w[k];
    out.grad[k] += 2.0 * cfg.lambda_reg * h.w[k];
  }
  out.loss += cfg.lambda_reg * reg;
  return out;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n,
                                                   std::size_t batch_size,
                                                   std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return out;
}

double long_term_accuracy(const LinearClassifier& h, const Dataset& data) {
  if (!(h.norm() > 0.0)) return plain_accuracy(h, data);
  return evaluate(h, data, long_term_price(h, data)).accuracy;
}

double train_price_of(const LinearClassifier& h, const Dataset& train) {
  return h.norm() > 0.0 ? long_term_price(h, train) : 0.0;
}

}  // namespace

ObjectiveValue objective(const Dataset& batch, const LinearClassifier& h,
                         const TrainConfig& cfg) {
  return hinge_core(batch, h, cfg, true);
}

ObjectiveValue hinge_objective(const Dataset& batch, const LinearClassifier& h,
                               const TrainConfig& cfg) {
  return hinge_core(batch, h, cfg, false);
}

ModelState adam_step(ModelState state, std::span<const double> gradient,
                     const TrainConfig& cfg) {
  const std::size_t d = state.classifier.dim();
  if (gradient.size() != d + 1 || state.adam_m.size() != d + 1 ||
      state.adam_v.size() != d + 1)
    throw DimensionMismatchError("Adam moment/gradient shape mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
  for (std::size_t k = 0; k <= d; ++k) {
    const double g = gradient[k];
    state.adam_m[k] = cfg.adam_beta1 * state.adam_m[k] + (1.0 - cfg.adam_beta1) * g;
    state.adam_v[k] =
        cfg.adam_beta2 * state.adam_v[k] + (1.0 - cfg.adam_beta2) * g * g;
    const double mhat = state.adam_m[k] / c1;
    const double vhat = state.adam_v[k] / c2;
    const double delta =
        cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
    if (k < d)
      state.classifier.w[k] -= delta;
    else
      state.classifier.tau -= delta;
  }
  return state;
}

ModelState train_naive(const Dataset& train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw InputError("train_naive on an empty dataset");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  LinearClassifier h;
  h.w.resize(train.dim());
  for (double& v : h.w) v = init(rng);
  ModelState state = ModelState::init(std::move(h));

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    const auto batches = make_batches(train.size(), cfg.batch_size, rng);
    for (const auto& idx : batches) {
      const ObjectiveValue f =
          hinge_objective(train.subset(idx), state.classifier, cfg);
      rec.loss += f.loss;
      state = adam_step(std::move(state), f.grad, cfg);
    }
    rec.loss /= static_cast<double>(batches.size());
    rec.val_accuracy = plain_accuracy(state.classifier, train);
    state.history.push_back(rec);
  }
  state.train_price = train_price_of(state.classifier, train);
  return state;
}

ModelState train_masc(const Dataset& train, const Dataset& val,
                      const TrainConfig& cfg) {
  const ModelState naive = train_naive(train, cfg);
  return train_masc(train, val, cfg, naive.classifier);
}

ModelState train_masc(const Dataset& train, const Dataset& val,
                      const TrainConfig& cfg, const LinearClassifier& init) {
  cfg.validate();
  if (train.empty() || val.empty())
    throw InputError("train_masc needs non-empty train and validation sets");
  // distinct stream from the naive model's
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  ModelState state = ModelState::init(init);

  EpochRecord first;
  first.val_accuracy = long_term_accuracy(state.classifier, val);
  state.history.push_back(first);
  double best_acc = first.val_accuracy;
  ModelState best = state;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t market_batches = 0;
    const auto batches = make_batches(train.size(), cfg.batch_size, rng);
    for (const auto& idx : batches) {
      const ObjectiveValue f = objective(train.subset(idx), state.classifier, cfg);
      rec.loss += f.loss;
      if (f.no_demand) {
        ++rec.no_demand_batches;
      } else {
        rec.rho_smooth += f.rho_smooth;
        ++market_batches;
      }
      if (f.clamped) ++rec.clamped_batches;
      state = adam_step(std::move(state), f.grad, cfg);
    }
    rec.loss /= static_cast<double>(batches.size());
    if (market_batches > 0) rec.rho_smooth /= static_cast<double>(market_batches);
    rec.val_accuracy = long_term_accuracy(state.classifier, val);
    state.history.push_back(rec);
    if (rec.val_accuracy > best_acc) {
      best_acc = rec.val_accuracy;
      best = state;
    }
  }
  // selected parameters, full training history
  best.history = std::move(state.history);
  best.train_price = train_price_of(best.classifier, train);
  return best;
}

std::vector<double> default_tau_grid(const Dataset& train,
                                     std::span<const double> w) {
  if (train.empty()) throw InputError("tau grid of an empty dataset");
  std::vector<double> s(train.size());
  kernels::omp::scores(train.feature_matrix(), train.dim(), w, 0.0, s);
  std::sort(s.begin(), s.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double lo = s.front() - iqr, hi = s.back() + iqr;
  constexpr std::size_t kPoints = 64;
  std::vector<double> grid(kPoints);
  // predict + iff w.x >= -tau, so tau spans the negated score range
  for (std::size_t k = 0; k < kPoints; ++k)
    grid[k] = -(lo + (hi - lo) * static_cast<double>(k) / (kPoints - 1));
  return grid;
}

ModelState train_strat(const Dataset& train, const Dataset& val,
                       const TrainConfig& cfg,
                       std::optional<std::vector<double>> tau_grid) {
  return train_strat(train, val, cfg, train_naive(train, cfg),
                     std::move(tau_grid));
}

ModelState train_strat(const Dataset& train, const Dataset& val,
                       const TrainConfig& cfg, const ModelState& naive,
                       std::optional<std::vector<double>> tau_grid) {
  if (train.empty() || val.empty())
    throw InputError("train_strat needs non-empty train and validation sets");
  cfg.validate();
  const LinearClassifier& base = naive.classifier;
  const double base_norm = base.norm();
  const double rho = train_price_of(base, train);

  LinearClassifier h;
  double tau_scale = 1.0;
  if (rho > 0.0 && base_norm > 0.0) {
    h.w = price_vector(rho, base.w);
    tau_scale = rho / base_norm;  // ‖p‖ / ‖w‖
  } else {
    // inert market: no price to align with, keep the naive direction
    h.w = base.w;
  }
  std::vector<double> grid =
      tau_grid ? std::move(*tau_grid) : default_tau_grid(train, h.w);
  grid.push_back(base.tau * tau_scale);

  double best_acc = -1.0;
  double best_tau = grid.front();
  for (double tau : grid) {
    h.tau = tau;
    const double acc = h.norm() > 0.0 ? evaluate(h, val, rho).accuracy
                                      : plain_accuracy(h, val);
    if (acc > best_acc) {
      best_acc = acc;
      best_tau = tau;
    }
  }
  h.tau = best_tau;
  ModelState out = ModelState::init(std::move(h));
  EpochRecord rec;
  rec.val_accuracy = best_acc;
  out.history.push_back(rec);
  out.train_price = rho;
  return out;
}

}  // namespace msc
