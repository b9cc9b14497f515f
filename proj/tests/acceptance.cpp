// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msc/analysis.hpp"
#include "msc/evaluation.hpp"
#include "msc/experiment.hpp"
#include "msc/learning.hpp"
#include "msc/pricing_exact.hpp"
#include "msc/pricing_smooth.hpp"
#include "msc/response.hpp"
#include "msc/synthetic.hpp"
#include "test_util.hpp"

using namespace msc;
using testutil::rel_err;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DemandProfile scaled(const DemandProfile& p, double a_units, double a_budgets) {
  std::vector<double> u, b;
  for (const auto& q : p.points) {
    u.push_back(q.units * a_units);
    b.push_back(q.budget * a_budgets);
  }
  return make_profile(u, b);
}

// 1. exact pricing against a dense grid search
Outcome pricing_oracle() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> size(1, 12);
  double worst = 0.0;
  int off_candidate = 0;
  for (int t = 0; t < 500; ++t) {
    const DemandProfile p = testutil::lognormal_profile(rng, size(rng));
    const PriceQuote q = exact_price(p);
    const PriceQuote bf = brute_force_price(p, 100000);
    worst = std::max(worst, rel_err(q.revenue, bf.revenue));
    bool cand = false;
    for (const auto& pt : p.points) cand |= rel_err(q.rho, 1.0 / pt.normalized) <= 1e-12;
    off_candidate += !cand;
  }
  return {worst <= 1e-9 && off_candidate == 0,
          fmt("max rel revenue gap %.3g, %d prices off the candidate set", worst, off_candidate)};
}

// 2. every candidate after the first earns the same revenue
Outcome equal_revenue() {
  double worst = 0.0;
  for (std::size_t m = 3; m <= 10; ++m) {
    const DemandProfile p = adversarial_equal_revenue(m);
    const RevenueCurve c = revenue_curve(p);
    std::vector<RevenueCandidate> cs = c.candidates;
    std::sort(cs.begin(), cs.end(), [](auto& a, auto& b) { return a.price > b.price; });
    for (std::size_t i = 2; i < cs.size(); ++i)
      worst = std::max(worst, rel_err(cs[i].revenue, cs[1].revenue));
  }
  const DemandProfile p3 = adversarial_equal_revenue(3);
  std::vector<double> u;
  for (const auto& q : p3.points) u.push_back(q.units);
  std::sort(u.begin(), u.end());
  const bool exact3 = u == std::vector<double>{1.0, 2.0, 6.0};
  return {worst <= 1e-9 && exact3,
          fmt("max rel spread %.3g, m=3 units %s", worst, exact3 ? "(1,2,6)" : "wrong")};
}

// 3. unit and budget rescaling
Outcome scale_equivariance() {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> size(1, 40);
  double worst = 0.0;
  int mismatched = 0;
  for (int t = 0; t < 100; ++t) {
    const DemandProfile p = testutil::lognormal_profile(rng, size(rng));
    const PriceQuote q = exact_price(p);
    const auto buyers = buyer_set(q.rho, p);
    for (double a : {0.01, 0.5, 7.0, 100.0}) {
      const DemandProfile pu = scaled(p, a, 1.0), pb = scaled(p, 1.0, a);
      const PriceQuote qu = exact_price(pu), qb = exact_price(pb);
      worst = std::max({worst, rel_err(qu.rho * a, q.rho), rel_err(qb.rho, a * q.rho)});
      mismatched += qu.setter_index != q.setter_index || qb.setter_index != q.setter_index;
      mismatched += buyer_set(qu.rho, pu) != buyers || buyer_set(qb.rho, pb) != buyers;
    }
  }
  return {worst <= 1e-9 && mismatched == 0,
          fmt("max rel error %.3g, %d setter/buyer mismatches", worst, mismatched)};
}

// 4. smoothed price approaches the exact one and keeps its scaling
Outcome smooth_limit() {
  std::mt19937_64 rng(1004);
  const SmoothPriceConfig cold{1e-4, 1e-4, 1e-12};
  const SmoothPriceConfig dflt;
  double gap = 0.0, scale = 0.0;
  for (int t = 0; t < 100; ++t) {
    const DemandProfile p = testutil::tie_free_profile(rng, 64);
    const double exact = exact_price(p).rho;
    const double r = smooth_price(p, cold).rho_smooth;
    gap = std::max(gap, std::abs(r - exact) / exact);
    for (const auto* cfg : {&cold, &dflt}) {
      const double base = smooth_price(p, *cfg).rho_smooth;
      for (double a : {0.01, 0.5, 7.0, 100.0})
        scale = std::max(scale, rel_err(smooth_price(scaled(p, a, 1.0), *cfg).rho_smooth * a, base));
    }
  }
  return {gap <= 1e-3 && scale <= 1e-9,
          fmt("max rel gap to exact %.3g, max scale error %.3g", gap, scale)};
}

// 5. analytic objective gradient against central differences
Outcome gradient_check() {
  std::mt19937_64 rng(1005);
  std::normal_distribution<double> nd(0.0, 1.0);
  const TrainConfig cfg;
  int checked = 0, skipped = 0;
  double worst = 0.0, worst_fine = 0.0;  // fine: step 1e-7, diagnostic only
  while (checked < 50) {
    const Dataset d = testutil::random_dataset(rng, 64, 5);
    LinearClassifier h{{}, nd(rng)};
    for (int k = 0; k < 5; ++k) h.w.push_back(nd(rng));
    const ObjectiveValue f = objective(d, h, cfg);

    // distance to non-smooth points of the loss
    const DemandProfile prof = demand_profile(h, d);
    double near = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double s = h.score(d.features(i));
      near = std::min(near, std::abs(s) / h.norm());
      const double shift = f.no_demand ? 0.0 : d.budget(i) / std::max(f.rho_smooth, cfg.smooth.rho_floor) * h.norm();
      near = std::min(near, std::abs(1.0 - d.y(i) * (s + shift)));
    }
    std::vector<double> ub;
    for (const auto& q : prof.points) ub.push_back(q.normalized);
    std::sort(ub.begin(), ub.end());
    for (std::size_t i = 1; i < ub.size(); ++i) near = std::min(near, (ub[i] - ub[i - 1]) / ub[i]);
    if (near < 1e-6) {
      ++skipped;
      continue;
    }

    std::vector<double> theta = h.w;
    theta.push_back(h.tau);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      auto at = [&](double v) {
        LinearClassifier g = h;
        (k < g.w.size() ? g.w[k] : g.tau) = v;
        return objective(d, g, cfg).loss;
      };
      auto err = [&](double rel) {
        const double step = rel * std::max(1.0, std::abs(theta[k]));
        const double fd = (at(theta[k] + step) - at(theta[k] - step)) / (2 * step);
        return std::abs(f.grad[k] - fd) / std::max(1.0, std::abs(fd));
      };
      worst = std::max(worst, err(1e-5));
      worst_fine = std::max(worst_fine, err(1e-7));
    }
    ++checked;
  }
  return {worst <= 1e-4,
          fmt("%d batches (%d skipped near kinks/ties), max rel error %.3g (step 1e-7: %.3g)",
              checked, skipped, worst, worst_fine)};
}

// 6. simulated market reproduces the priced revenue
Outcome simulation_consistency() {
  std::mt19937_64 rng(1006);
  std::normal_distribution<double> nd(0.0, 1.0);
  double rev = 0.0, boundary = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Dataset d = testutil::random_dataset(rng, 80, 4);
    LinearClassifier h{{nd(rng), nd(rng), nd(rng), nd(rng)}, nd(rng)};
    const PriceQuote q = exact_price(demand_profile(h, d));
    const MarketOutcome o = simulate_market(h, d, q.rho);
    rev = std::max(rev, std::abs(o.total_revenue - q.revenue) / std::max(1.0, q.revenue));
    for (std::size_t i = 0; i < o.size(); ++i)
      if (o.moved[i]) boundary = std::max(boundary, std::abs(h.score(o.post(i))) / h.norm());
  }
  return {rev <= 1e-9 && boundary <= 1e-9,
          fmt("max revenue gap %.3g, max boundary distance %.3g (x |w|)", rev, boundary)};
}

// 7. price setters sit in the upper tail of Beta-shaped demand
Outcome extreme_setters() {
  const auto grid = default_beta_grid();
  double lowest = 1.0;
  int above95 = 0;
  std::string cells;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    ScenarioSpec s = ScenarioSpec::defaults(ScenarioKind::beta_demand);
    s.beta_a = grid[c].first;
    s.beta_b = grid[c].second;
    s.m = 2000;
    s.seed = 7000 + c;
    const double pct = price_setter_percentile(beta_demand(s));
    lowest = std::min(lowest, pct);
    above95 += pct > 0.95;
    cells += fmt(" %.3g", pct);
  }
  return {lowest >= 0.8 && above95 >= 8,
          fmt("min %.3f, %d/12 above 0.95; cells:%s", lowest, above95, cells.c_str())};
}

// 8. budgets falling with demand push fewer buyers into the market
Outcome budget_distortion() {
  auto ratio = [](double alpha) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::mt19937_64 rng(8000 + seed);
      std::normal_distribution<double> nd(0.0, 1.0);
      std::vector<double> raw(2000);
      for (double& v : raw) v = nd(rng);
      const auto u = rescale_to(raw, 1.0, 2.0);
      sum += price_setter_percentile(make_profile(u, power_budgets(u, alpha)));
    }
    return sum / 5.0;
  };
  const double r0 = ratio(0.0), r16 = ratio(16.0), r32 = ratio(32.0);
  return {r16 >= 0.2 && r16 <= 0.4 && r32 < r0,
          fmt("crossing ratio %.3f at alpha=0, %.3f at 16, %.3f at 32", r0, r16, r32)};
}

// 9. accuracy jump in the threshold sweep
Outcome threshold_jump() {
  std::vector<double> taus, negated;
  for (int k = 0; k <= 120; ++k) {
    taus.push_back(-1.0 + 0.05 * k);
    negated.push_back(-taus.back());  // boundary at z = tau
  }
  const std::vector<double> w{1.0};
  ScenarioSpec s = ScenarioSpec::defaults(ScenarioKind::gaussian_threshold);
  s.m = 4000;
  s.b_max = 5.0;
  s.seed = 9;
  const auto recs = threshold_sweep(w, gaussian_threshold_scenario(s).first, negated);
  double best = 0.0, first = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < recs.size(); ++k) {
    best = std::max(best, recs[k].accuracy);
    if (std::isnan(first) && recs[k].accuracy >= 0.9) first = taus[k];
  }
  s.b_max = s.b_min;
  const auto flat = threshold_sweep(w, gaussian_threshold_scenario(s).first, negated);
  double flat_best = 0.0;
  for (const auto& r : flat) flat_best = std::max(flat_best, r.accuracy);
  const bool pass = best >= 0.9 && first >= 0.5 && first <= 1.25 && flat_best <= 0.6;
  return {pass, fmt("max accuracy %.3f, first tau reaching 0.9 = %.2f; uniform budgets max %.3f",
                    best, first, flat_best)};
}

// 10. a market-aware classifier beats every threshold on the informative feature
Outcome market_aware_separation() {
  double thr_sum = 0.0, any_sum = 0.0, masc_sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioSpec s = ScenarioSpec::defaults(ScenarioKind::two_feature);
    s.m = 4000;
    s.seed = seed;
    const Dataset d = two_feature_scenario(s);
    // thresholds placed between the class means, and anywhere
    double between = 0.0, anywhere = 0.0;
    for (int k = -100; k <= 300; ++k) {
      const double t = 0.01 * k;
      const LinearClassifier h{{1.0, 0.0}, -t};
      const double acc = evaluate(h, d, long_term_price(h, d)).accuracy;
      anywhere = std::max(anywhere, acc);
      if (k <= 100) between = std::max(between, acc);
    }
    // naive init, then the learning rate picked on validation
    const auto parts = split_dataset(d, SplitFractions{}, seed, 0);
    TrainConfig cfg;
    cfg.seed = seed;
    const ModelState naive = train_naive(parts[0], cfg);
    double best_val = -1.0, acc = 0.0;
    for (double lr : {1e-3, 1e-2}) {
      cfg.learning_rate = lr;
      const ModelState masc = train_masc(parts[0], parts[1], cfg, naive.classifier);
      const LinearClassifier& h = masc.classifier;
      const double val = evaluate(h, parts[1], long_term_price(h, parts[1])).accuracy;
      if (val > best_val) {
        best_val = val;
        acc = evaluate_short_long(h, parts[2], masc.train_price).second.accuracy;
      }
    }
    thr_sum += between;
    any_sum += anywhere;
    masc_sum += acc;
    per_seed += fmt(" (%.3f, %.3f)", between, acc);
  }
  const double thr = thr_sum / 5, masc = masc_sum / 5;
  return {thr <= 0.45 && masc >= 0.9,
          fmt("best x1 threshold in [-1,1] %.3f, market-aware %.3f; per seed:%s; "
              "unrestricted x1 threshold %.3f",
              thr, masc, per_seed.c_str(), any_sum / 5)};
}

// 11. expected-revenue maximizers
Outcome expected_revenue_theory() {
  std::mt19937_64 rng(1011);
  std::uniform_real_distribution<double> ud(0.0, 5.0);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double a = ud(rng), b = a + 0.5 + ud(rng);
    worst = std::max(worst, rel_err(expected_maximizer(PdfSpec::uniform(a, b)).u_star, b));
  }
  const double beta23 = expected_maximizer(PdfSpec::beta(2, 3)).u_star;
  const PdfSpec logconcave[] = {PdfSpec::uniform(1, 10),   PdfSpec::beta(2, 3),
                                PdfSpec::beta(2, 2, 1, 10), PdfSpec::beta(5, 2, 1, 10),
                                PdfSpec::beta(1, 3, 1, 10), PdfSpec::beta(3, 1),
                                PdfSpec::normal(5, 1, 1, 10), PdfSpec::normal(2, 0.5, 0, 4)};
  int certified = 0;
  for (const auto& p : logconcave) certified += expected_maximizer(p).unique;
  const int n = static_cast<int>(std::size(logconcave));
  return {worst <= 1e-4 && beta23 >= 0.5 && certified == n,
          fmt("uniform max rel error %.3g, Beta(2,3) maximizer %.4f, %d/%d certified unique",
              worst, beta23, certified, n)};
}

// 12. budget scale sweep on the budget/label-independent construction
Outcome semi_synthetic() {
  ExperimentConfig cfg;
  cfg.command = Command::sweep;
  cfg.scenario = ScenarioSpec::defaults(ScenarioKind::budget_label_independent);
  cfg.scenario->m = 5000;
  cfg.repetitions = 5;
  cfg.seed = 12;
  cfg.sweep.kind = SweepKind::alpha;
  cfg.sweep.values = {2, 4, 6, 8, 10};
  const Report r = run_experiment(cfg);

  // alpha,method,horizon,metric,n,mean,stderr
  std::map<std::pair<std::string, double>, std::pair<double, double>> long_acc;
  std::istringstream in(r.csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
    if (f.size() == 7 && f[2] == "long" && f[3] == "accuracy")
      long_acc[{f[1], std::stod(f[0])}] = {std::stod(f[5]), std::stod(f[6])};
  }
  bool monotone = true, beats = true;
  std::string masc, strat;
  for (std::size_t k = 0; k < cfg.sweep.values.size(); ++k) {
    const double a = cfg.sweep.values[k];
    const auto [mm, ms] = long_acc[{"masc", a}];
    const auto [sm, ss] = long_acc[{"strat", a}];
    masc += fmt(" %.3f+-%.3f", mm, ms);
    strat += fmt(" %.3f", sm);
    if (k > 0) {
      const auto [pm, ps] = long_acc[{"masc", cfg.sweep.values[k - 1]}];
      monotone &= mm >= pm - std::max(ms, ps);
    }
    if (a >= 6) beats &= mm >= sm;
  }
  return {monotone && beats && long_acc.size() >= 10,
          fmt("long-term accuracy by alpha; masc:%s; strat:%s", masc.c_str(), strat.c_str())};
}

// 13. byte-identical reports
Outcome determinism() {
  ExperimentConfig cfg;
  cfg.command = Command::train;
  cfg.scenario = ScenarioSpec::defaults(ScenarioKind::budget_label_independent);
  cfg.scenario->m = 1500;
  cfg.repetitions = 3;
  cfg.train.epochs = 10;
  cfg.seed = 13;
  const Report a = run_experiment(cfg), b = run_experiment(cfg);
  ExperimentConfig sw = cfg;
  sw.command = Command::sweep;
  sw.sweep.kind = SweepKind::tau;
  sw.scenario = ScenarioSpec::defaults(ScenarioKind::gaussian_threshold);
  sw.classifier = LinearClassifier{{1.0}, 0.0};
  sw.sweep.values = {-1.0, -0.5, 0.0, 0.5};
  const Report c = run_experiment(sw), e = run_experiment(sw);
  const bool same = a.jsonl == b.jsonl && a.csv == b.csv && c.jsonl == e.jsonl && c.csv == e.csv;
  return {same, fmt("train report %zu bytes, sweep report %zu bytes, %s", a.jsonl.size(),
                    c.jsonl.size(), same ? "identical" : "DIFFERENT")};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"pricing oracle equivalence", pricing_oracle},
      {"equal-revenue construction", equal_revenue},
      {"scale equivariance", scale_equivariance},
      {"smooth price limit", smooth_limit},
      {"gradient check", gradient_check},
      {"revenue/simulation consistency", simulation_consistency},
      {"extreme price setters", extreme_setters},
      {"budget distortion", budget_distortion},
      {"threshold jump", threshold_jump},
      {"market-aware separation", market_aware_separation},
      {"expected-revenue theory", expected_revenue_theory},
      {"semi-synthetic budget sweep", semi_synthetic},
      {"determinism", determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    if (!only.empty() && std::find(only.begin(), only.end(), k) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", k, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  const int ran = only.empty() ? k : static_cast<int>(only.size());
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
