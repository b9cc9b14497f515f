#include "msc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "msc/dataset_io.hpp"
#include "msc/errors.hpp"
#include "msc/evaluation.hpp"
#include "msc/pricing_exact.hpp"
#include "msc/pricing_smooth.hpp"

namespace msc {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 6> kCommands{"price", "simulate", "train",
                                                    "eval",  "sweep",    "synth"};
constexpr std::array<std::string_view, 6> kSweeps{
    "alpha", "tau", "cluster", "beta_grid", "convergence", "sensitivity"};

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Reads one JSON object, remembering which keys were consumed so that any
// leftover key can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be a JSON object");
  }

  // null reads as absent, so a resolved config loads back unchanged
  bool has(const char* key) { return raw(key) != nullptr; }

  const json* raw(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return j_.at(key).is_null() ? nullptr : &j_.at(key);
  }

  void get(const char* key, double& dst) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) throw type_error(key, "a number");
      dst = v->get<double>();
      if (!std::isfinite(dst)) throw ConfigError(where(key) + " must be finite");
    }
  }
  void get(const char* key, std::size_t& dst) {
    if (const json* v = raw(key)) {
      if (!v->is_number_unsigned()) throw type_error(key, "a non-negative integer");
      dst = v->get<std::size_t>();
    }
  }
  void get(const char* key, bool& dst) {
    if (const json* v = raw(key)) {
      if (!v->is_boolean()) throw type_error(key, "a boolean");
      dst = v->get<bool>();
    }
  }
  void get(const char* key, std::string& dst) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) throw type_error(key, "a string");
      dst = v->get<std::string>();
    }
  }
  void get(const char* key, std::vector<double>& dst) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) throw type_error(key, "an array of numbers");
      dst.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw type_error(key, "an array of numbers");
        dst.push_back(e.get<double>());
      }
    }
  }
  void get(const char* key, std::vector<std::size_t>& dst) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) throw type_error(key, "an array of integers");
      dst.clear();
      for (const auto& e : *v) {
        if (!e.is_number_unsigned()) throw type_error(key, "an array of integers");
        dst.push_back(e.get<std::size_t>());
      }
    }
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown key '" + where(k.c_str()) + "'");
  }

  std::string where(const char* key = nullptr) const {
    if (!key) return path_.empty() ? "config" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

 private:
  ConfigError type_error(const char* key, const char* what) const {
    return ConfigError(where(key) + " must be " + what);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ScenarioSpec parse_scenario(const json& j, bool& seed_given) {
  ObjectReader r(j, "scenario");
  std::string kind;
  r.get("kind", kind);
  if (kind.empty()) throw ConfigError("scenario.kind is required");
  ScenarioSpec s = ScenarioSpec::defaults(scenario_kind_from_string(kind));
  r.get("mu", s.mu);
  r.get("sigma", s.sigma);
  r.get("beta_a", s.beta_a);
  r.get("beta_b", s.beta_b);
  r.get("lo", s.lo);
  r.get("hi", s.hi);
  r.get("p1", s.p1);
  std::string rule;
  r.get("budget_rule", rule);
  if (!rule.empty()) {
    if (rule == "uniform") s.budget_rule = BudgetRule::uniform;
    else if (rule == "power") s.budget_rule = BudgetRule::power;
    else throw ConfigError("scenario.budget_rule must be 'uniform' or 'power'");
  }
  r.get("alpha", s.alpha);
  r.get("b_min", s.b_min);
  r.get("b_max", s.b_max);
  r.get("b1", s.b1);
  r.get("gap", s.gap);
  r.get("sigma_aux", s.sigma_aux);
  r.get("budget_slope", s.budget_slope);
  r.get("budget_noise", s.budget_noise);
  r.get("budget_floor", s.budget_floor);
  r.get("m", s.m);
  seed_given = r.has("seed");
  std::size_t seed = s.seed;
  r.get("seed", seed);
  s.seed = seed;
  r.finish();
  return s;
}

PdfSpec parse_pdf(const json& j) {
  ObjectReader r(j, "sweep.pdf");
  std::string family = "beta";
  r.get("family", family);
  PdfSpec p;
  if (family == "beta") p.family = PdfFamily::beta;
  else if (family == "uniform") p.family = PdfFamily::uniform;
  else if (family == "normal") p.family = PdfFamily::normal;
  else if (family == "mixture") p.family = PdfFamily::normal_mixture;
  else throw ConfigError("sweep.pdf.family must be beta, uniform, normal or mixture");
  r.get("a", p.a);
  r.get("b", p.b);
  r.get("mu", p.mu);
  r.get("sigma", p.sigma);
  r.get("mu2", p.mu2);
  r.get("sigma2", p.sigma2);
  r.get("weight", p.weight);
  r.get("lo", p.lo);
  r.get("hi", p.hi);
  r.finish();
  return p;
}

std::string_view pdf_family_name(PdfFamily f) {
  switch (f) {
    case PdfFamily::beta: return "beta";
    case PdfFamily::uniform: return "uniform";
    case PdfFamily::normal: return "normal";
    case PdfFamily::normal_mixture: return "mixture";
  }
  return "beta";
}

ojson scenario_json(const ScenarioSpec& s) {
  ojson j;
  j["kind"] = to_string(s.kind);
  j["mu"] = s.mu;
  j["sigma"] = s.sigma;
  j["beta_a"] = s.beta_a;
  j["beta_b"] = s.beta_b;
  j["lo"] = s.lo;
  j["hi"] = s.hi;
  j["p1"] = s.p1;
  j["budget_rule"] = s.budget_rule == BudgetRule::power ? "power" : "uniform";
  j["alpha"] = s.alpha;
  j["b_min"] = s.b_min;
  j["b_max"] = s.b_max;
  j["b1"] = s.b1;
  j["gap"] = s.gap;
  j["sigma_aux"] = s.sigma_aux;
  j["budget_slope"] = s.budget_slope;
  j["budget_noise"] = s.budget_noise;
  j["budget_floor"] = s.budget_floor;
  j["m"] = s.m;
  j["seed"] = s.seed;
  return j;
}

ScenarioSpec resolved_scenario(const ExperimentConfig& cfg) {
  if (!cfg.scenario) throw ConfigError("a 'scenario' block is required");
  ScenarioSpec s = *cfg.scenario;
  if (!cfg.scenario_seed_given) s.seed = cfg.seed;
  return s;
}

bool is_profile_kind(ScenarioKind k) {
  return k == ScenarioKind::beta_demand ||
         k == ScenarioKind::adversarial_equal_revenue;
}

DemandProfile scenario_profile(const ScenarioSpec& s) {
  if (s.kind == ScenarioKind::beta_demand) return beta_demand(s);
  return adversarial_equal_revenue(s.m);
}

Dataset resolve_dataset(const ExperimentConfig& cfg, bool apply_alpha) {
  Dataset data;
  if (cfg.dataset) {
    data = load_dataset(*cfg.dataset, {cfg.allow_negative_features});
  } else if (cfg.scenario) {
    data = generate_dataset(resolved_scenario(cfg));
  } else {
    throw ConfigError("either 'dataset' or 'scenario' is required");
  }
  if (data.empty()) throw InputError("dataset has no rows");
  if (apply_alpha && cfg.alpha) data = rescale_budgets(data, *cfg.alpha);
  return data;
}

const LinearClassifier& require_classifier(const ExperimentConfig& cfg,
                                           std::size_t dim) {
  if (!cfg.classifier) throw ConfigError("a 'classifier' block is required");
  if (cfg.classifier->dim() != dim)
    throw DimensionMismatchError("classifier dimension " +
                                 std::to_string(cfg.classifier->dim()) +
                                 " does not match dataset dimension " +
                                 std::to_string(dim));
  return *cfg.classifier;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void put_metrics(ojson& j, const Metrics& m) {
  j["accuracy"] = m.accuracy;
  j["welfare"] = m.welfare;
  j["burden"] = m.burden;
  j["crossed_pos_ratio"] = m.crossed_pos_ratio;
  j["crossed_neg_ratio"] = m.crossed_neg_ratio;
  j["rho"] = m.rho_used;
  j["n_movers"] = m.n_movers;
}

// ---- train protocol --------------------------------------------------------

struct MetricRow {
  std::optional<double> sweep_value;
  std::size_t split = 0;
  std::string method, horizon;
  Metrics m;
};

constexpr std::array<std::string_view, 7> kMetricNames{
    "accuracy", "welfare", "burden", "crossed_pos_ratio",
    "crossed_neg_ratio", "rho", "n_movers"};

double metric_value(const Metrics& m, std::size_t k) {
  switch (k) {
    case 0: return m.accuracy;
    case 1: return m.welfare;
    case 2: return m.burden;
    case 3: return m.crossed_pos_ratio;
    case 4: return m.crossed_neg_ratio;
    case 5: return m.rho_used;
    default: return static_cast<double>(m.n_movers);
  }
}

std::vector<MetricRow> one_split(const Dataset& data, const ExperimentConfig& cfg,
                                 std::size_t rep, std::optional<double> sv) {
  auto [train, val, test] = split_dataset(data, cfg.split, cfg.seed, rep);
  TrainConfig tc = cfg.train;
  tc.seed = mix64(cfg.seed ^ mix64(rep + 1));

  const ModelState naive = train_naive(train, tc);
  const ModelState strat = train_strat(train, val, tc, naive);
  const ModelState masc = train_masc(train, val, tc, naive.classifier);

  std::vector<MetricRow> rows;
  const std::pair<const char*, const ModelState*> models[] = {
      {"naive", &naive}, {"strat", &strat}, {"masc", &masc}};
  for (const auto& [name, state] : models) {
    const auto [s, l] = evaluate_short_long(state->classifier, test, state->train_price);
    rows.push_back({sv, rep, name, "short", s});
    rows.push_back({sv, rep, name, "long", l});
  }
  Metrics bench;
  bench.accuracy = plain_accuracy(naive.classifier, test);
  rows.push_back({sv, rep, "naive", "benchmark", bench});
  return rows;
}

std::vector<MetricRow> run_protocol(const Dataset& data,
                                    const ExperimentConfig& cfg,
                                    std::optional<double> sv) {
  const std::size_t reps = cfg.repetitions;
  std::vector<std::vector<MetricRow>> per(reps);
  std::vector<std::exception_ptr> errors(reps);
  const auto n = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    try {
      per[r] = one_split(data, cfg, static_cast<std::size_t>(r), sv);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<MetricRow> rows;
  for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

void emit_protocol(const std::vector<MetricRow>& rows, const char* sweep_key,
                   std::string& jsonl, std::string& csv) {
  for (const auto& r : rows) {
    ojson j;
    j["record"] = "metric";
    if (r.sweep_value) j[sweep_key] = *r.sweep_value;
    j["split"] = r.split;
    j["method"] = r.method;
    j["horizon"] = r.horizon;
    put_metrics(j, r.m);
    jsonl += j.dump() + "\n";
  }

  // groups in first-seen order
  std::vector<std::vector<const MetricRow*>> groups;
  std::map<std::tuple<double, std::string, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.sweep_value.value_or(0.0), r.method, r.horizon);
    auto [it, fresh] = index.try_emplace(key, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  csv += sweep_key ? std::string(sweep_key) + "," : std::string();
  csv += "method,horizon,metric,n,mean,stderr\n";
  for (const auto& g : groups) {
    const MetricRow& head = *g.front();
    for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
      if (head.horizon == "benchmark" && k != 0) continue;
      const double n = static_cast<double>(g.size());
      double sum = 0.0;
      for (const auto* r : g) sum += metric_value(r->m, k);
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto* r : g) {
        const double d = metric_value(r->m, k) - mean;
        ss += d * d;
      }
      const double se = g.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;

      ojson j;
      j["record"] = "aggregate";
      if (head.sweep_value) j[sweep_key] = *head.sweep_value;
      j["method"] = head.method;
      j["horizon"] = head.horizon;
      j["metric"] = kMetricNames[k];
      j["n"] = g.size();
      j["mean"] = mean;
      j["stderr"] = se;
      jsonl += j.dump() + "\n";

      if (sweep_key) csv += fmt(head.sweep_value.value_or(0.0)) + ",";
      csv += head.method + "," + head.horizon + "," + std::string(kMetricNames[k]) +
             "," + std::to_string(g.size()) + "," + fmt(mean) + "," + fmt(se) + "\n";
    }
  }
}

// ---- flat tables -----------------------------------------------------------

// Records with scalar fields; the CSV mirrors them with the first record's
// keys as header.
void emit_table(const std::vector<ojson>& records, std::string& jsonl,
                std::string& csv) {
  for (const auto& r : records) jsonl += r.dump() + "\n";
  if (records.empty()) return;
  bool first = true;
  for (const auto& [k, _] : records.front().items()) {
    csv += (first ? "" : ",") + k;
    first = false;
  }
  csv += "\n";
  for (const auto& r : records) {
    first = true;
    for (const auto& [k, v] : r.items()) {
      if (!first) csv += ",";
      first = false;
      if (v.is_string()) csv += v.get<std::string>();
      else if (v.is_number_float()) csv += fmt(v.get<double>());
      else if (v.is_null()) csv += "";
      else csv += v.dump();
    }
    csv += "\n";
  }
}

ojson threshold_json(const ThresholdRecord& t) {
  ojson j;
  j["record"] = "threshold";
  j["tau"] = t.tau;
  j["rho"] = t.rho;
  j["accuracy"] = t.accuracy;
  j["crossed_pos_ratio"] = t.crossed_pos_ratio;
  j["crossed_neg_ratio"] = t.crossed_neg_ratio;
  j["setter_percentile"] = t.setter_percentile;
  j["welfare"] = t.welfare;
  j["burden"] = t.burden;
  j["n_movers"] = t.n_movers;
  j["zero_one"] = t.zero_one;
  j["mhinge_exact"] = t.mhinge_exact;
  j["mhinge_smooth"] = t.mhinge_smooth;
  return j;
}

// ---- commands --------------------------------------------------------------

Report run_price(const ExperimentConfig& cfg) {
  DemandProfile profile;
  if (cfg.profile) {
    profile = load_profile(*cfg.profile);
  } else if (!cfg.dataset && cfg.scenario && is_profile_kind(cfg.scenario->kind)) {
    profile = scenario_profile(resolved_scenario(cfg));
  } else {
    const Dataset data = resolve_dataset(cfg, true);
    const LinearClassifier& h = require_classifier(cfg, data.dim());
    profile = cfg.movement == MovementMode::single_feature
                  ? single_feature_profile(h, data, cfg.feature)
                  : demand_profile(h, data);
  }
  Report rep;
  ojson j;
  j["record"] = "price";
  j["size"] = profile.size();
  if (profile.empty()) {
    j["rho"] = 0.0;
    j["revenue"] = 0.0;
    j["buyers"] = 0;
    j["setter_index"] = nullptr;
    j["setter_percentile"] = nullptr;
    j["rho_smooth"] = 0.0;
  } else {
    const PriceQuote q = exact_price(profile);
    j["rho"] = q.rho;
    j["revenue"] = q.revenue;
    j["buyers"] = q.buyers;
    if (q.setter_index) j["setter_index"] = *q.setter_index;
    else j["setter_index"] = nullptr;
    j["setter_percentile"] =
        static_cast<double>(q.buyers) / static_cast<double>(profile.size());
    j["rho_smooth"] = smooth_price(profile, cfg.train.smooth).rho_smooth;
  }
  rep.jsonl += j.dump() + "\n";

  std::vector<ojson> rows;
  if (!profile.empty())
    for (const auto& c : revenue_curve(profile).candidates) {
      ojson r;
      r["record"] = "candidate";
      r["origin_index"] = c.origin_index;
      r["price"] = c.price;
      r["revenue"] = c.revenue;
      rows.push_back(std::move(r));
    }
  emit_table(rows, rep.jsonl, rep.csv);
  return rep;
}

Report run_simulate(const ExperimentConfig& cfg) {
  const Dataset data = resolve_dataset(cfg, true);
  const LinearClassifier& h = require_classifier(cfg, data.dim());
  const bool single = cfg.movement == MovementMode::single_feature;
  double rho = 0.0;
  if (cfg.rho) {
    rho = *cfg.rho;
  } else {
    const DemandProfile p = single ? single_feature_profile(h, data, cfg.feature)
                                   : demand_profile(h, data);
    rho = p.empty() ? 0.0 : exact_price(p).rho;
  }
  const MarketOutcome out = single
                                ? simulate_market_single_feature(h, data, rho, cfg.feature)
                                : simulate_market(h, data, rho);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    correct += predict(h, out.post(i)) == data.y(i);

  Report rep;
  ojson j;
  j["record"] = "simulate";
  j["mode"] = single ? "single_feature" : "directional";
  j["rho"] = rho;
  j["size"] = data.size();
  j["n_movers"] = out.movers();
  j["total_revenue"] = out.total_revenue;
  j["accuracy"] = static_cast<double>(correct) / static_cast<double>(data.size());
  if (!single) {
    const Metrics m = evaluate(h, data, rho);
    j["welfare"] = m.welfare;
    j["burden"] = m.burden;
    j["crossed_pos_ratio"] = m.crossed_pos_ratio;
    j["crossed_neg_ratio"] = m.crossed_neg_ratio;
  }
  rep.jsonl += j.dump() + "\n";

  std::string resp;
  resp += "index,moved,spend";
  for (std::size_t k = 0; k < data.dim(); ++k) resp += ",post_" + std::to_string(k);
  resp += "\n";
  for (std::size_t i = 0; i < out.size(); ++i) {
    resp += std::to_string(i) + "," + (out.moved[i] ? "1" : "0") + "," + fmt(out.spend[i]);
    for (double v : out.post(i)) resp += "," + fmt(v);
    resp += "\n";
  }
  rep.csv = "mode,rho,size,n_movers,total_revenue,accuracy\n";
  rep.csv += std::string(single ? "single_feature" : "directional") + "," + fmt(rho) +
             "," + std::to_string(data.size()) + "," + std::to_string(out.movers()) +
             "," + fmt(out.total_revenue) + "," + fmt(j["accuracy"].get<double>()) + "\n";
  rep.files.emplace_back("responses.csv", std::move(resp));
  return rep;
}

Report run_train(const ExperimentConfig& cfg) {
  const Dataset data = resolve_dataset(cfg, true);
  Report rep;
  emit_protocol(run_protocol(data, cfg, std::nullopt), nullptr, rep.jsonl, rep.csv);
  return rep;
}

Report run_eval(const ExperimentConfig& cfg) {
  const Dataset data = resolve_dataset(cfg, true);
  const LinearClassifier& h = require_classifier(cfg, data.dim());
  const double rho_train = cfg.rho ? *cfg.rho : long_term_price(h, data);
  const auto [s, l] = evaluate_short_long(h, data, rho_train);
  Metrics bench;
  bench.accuracy = plain_accuracy(h, data);
  std::vector<MetricRow> rows{{std::nullopt, 0, "given", "short", s},
                              {std::nullopt, 0, "given", "long", l},
                              {std::nullopt, 0, "given", "benchmark", bench}};
  Report rep;
  emit_protocol(rows, nullptr, rep.jsonl, rep.csv);
  return rep;
}

Report run_sweep(const ExperimentConfig& cfg) {
  const SweepConfig& sw = cfg.sweep;
  Report rep;
  switch (sw.kind) {
    case SweepKind::alpha: {
      if (sw.values.empty()) throw ConfigError("sweep.values (alpha list) is required");
      const Dataset base = resolve_dataset(cfg, false);
      std::vector<MetricRow> rows;
      for (double a : sw.values) {
        auto part = run_protocol(rescale_budgets(base, a), cfg, a);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      emit_protocol(rows, "alpha", rep.jsonl, rep.csv);
      break;
    }
    case SweepKind::tau: {
      if (sw.values.empty()) throw ConfigError("sweep.values (tau list) is required");
      const Dataset data = resolve_dataset(cfg, true);
      const LinearClassifier& h = require_classifier(cfg, data.dim());
      std::vector<ojson> recs;
      for (const auto& t : threshold_sweep(h.w, data, sw.values, cfg.train.smooth))
        recs.push_back(threshold_json(t));
      emit_table(recs, rep.jsonl, rep.csv);
      break;
    }
    case SweepKind::cluster: {
      if (sw.values.empty()) throw ConfigError("sweep.values (class-mean list) is required");
      ScenarioSpec spec = cfg.scenario ? resolved_scenario(cfg)
                                       : ScenarioSpec::defaults(ScenarioKind::gaussian_threshold);
      if (!cfg.scenario) spec.seed = cfg.seed;
      if (spec.kind != ScenarioKind::gaussian_threshold)
        throw ConfigError("cluster sweeps need a gaussian_threshold scenario");
      std::vector<double> taus = sw.taus;
      if (taus.empty())
        for (int k = 0; k <= 60; ++k) taus.push_back(-1.5 + 0.05 * k);
      const std::vector<double> w{1.0};
      std::vector<ojson> recs;
      for (double mu : sw.values) {
        spec.mu = mu;
        const Dataset data = gaussian_threshold_scenario(spec).first;
        for (const auto& t : threshold_sweep(w, data, taus, cfg.train.smooth)) {
          ojson j = threshold_json(t);
          ojson r;
          r["record"] = "cluster";
          r["mu"] = mu;
          for (auto it = std::next(j.begin()); it != j.end(); ++it) r[it.key()] = it.value();
          recs.push_back(std::move(r));
        }
      }
      emit_table(recs, rep.jsonl, rep.csv);
      break;
    }
    case SweepKind::beta_grid: {
      ScenarioSpec spec = ScenarioSpec::defaults(ScenarioKind::beta_demand);
      if (cfg.scenario) spec = resolved_scenario(cfg);
      else spec.seed = cfg.seed;
      spec.m = sw.m;
      std::vector<ojson> recs;
      std::size_t cell = 0;
      for (const auto& [a, b] : sw.beta_grid) {
        ScenarioSpec s = spec;
        s.kind = ScenarioKind::beta_demand;
        s.beta_a = a;
        s.beta_b = b;
        s.seed = mix64(spec.seed + cell++);
        const DemandProfile p = beta_demand(s);
        const PriceQuote q = exact_price(p);
        ojson j;
        j["record"] = "beta_cell";
        j["a"] = a;
        j["b"] = b;
        j["m"] = p.size();
        j["rho"] = q.rho;
        j["revenue"] = q.revenue;
        j["setter_percentile"] =
            static_cast<double>(q.buyers) / static_cast<double>(p.size());
        recs.push_back(std::move(j));
      }
      emit_table(recs, rep.jsonl, rep.csv);
      break;
    }
    case SweepKind::convergence: {
      std::vector<ojson> recs;
      for (const auto& c : convergence_with_m(sw.pdf, sw.m_values, sw.trials, cfg.seed)) {
        ojson j;
        j["record"] = "convergence";
        j["m"] = c.m;
        j["mean_rho"] = c.mean_rho;
        j["sd_rho"] = c.sd_rho;
        j["mean_revenue"] = c.mean_revenue;
        j["sd_revenue"] = c.sd_revenue;
        recs.push_back(std::move(j));
      }
      emit_table(recs, rep.jsonl, rep.csv);
      break;
    }
    case SweepKind::sensitivity: {
      if (sw.values.empty()) throw ConfigError("sweep.values (u0 list) is required");
      std::mt19937_64 rng(cfg.seed);
      const DemandProfile base = sample_profile(sw.pdf, sw.m, rng);
      std::vector<ojson> recs;
      for (const auto& s : sensitivity_add_point(base, sw.values, sw.b0)) {
        ojson j;
        j["record"] = "sensitivity";
        j["u0"] = s.u0;
        j["rho"] = s.rho;
        if (s.setter_index) j["setter_index"] = *s.setter_index;
        else j["setter_index"] = nullptr;
        j["new_point_sets_price"] = s.new_point_sets_price;
        recs.push_back(std::move(j));
      }
      emit_table(recs, rep.jsonl, rep.csv);
      break;
    }
  }
  return rep;
}

Report run_synth(const ExperimentConfig& cfg) {
  const ScenarioSpec s = resolved_scenario(cfg);
  Report rep;
  ojson j;
  j["record"] = "synth";
  j["kind"] = to_string(s.kind);
  std::ostringstream os;
  if (is_profile_kind(s.kind)) {
    const DemandProfile p = scenario_profile(s);
    write_profile(os, p);
    j["size"] = p.size();
    rep.files.emplace_back("profile.csv", os.str());
  } else {
    std::string description;
    Dataset d;
    if (s.kind == ScenarioKind::gaussian_threshold) {
      auto gen = gaussian_threshold_scenario(s);
      d = std::move(gen.first);
      description = std::move(gen.second);
    } else {
      d = generate_dataset(s);
    }
    write_dataset(os, d);
    std::size_t pos = 0;
    for (int l : d.labels()) pos += static_cast<std::size_t>(l);
    j["size"] = d.size();
    j["dim"] = d.dim();
    j["positives"] = pos;
    if (!description.empty()) j["description"] = description;
    rep.files.emplace_back("dataset.csv", os.str());
  }
  emit_table({j}, rep.jsonl, rep.csv);
  return rep;
}

}  // namespace

std::string_view to_string(Command c) { return kCommands[static_cast<std::size_t>(c)]; }
std::string_view to_string(SweepKind k) { return kSweeps[static_cast<std::size_t>(k)]; }

Command command_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kCommands.size(); ++i)
    if (kCommands[i] == name) return static_cast<Command>(i);
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

SweepKind sweep_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kSweeps.size(); ++i)
    if (kSweeps[i] == name) return static_cast<SweepKind>(i);
  throw ConfigError("unknown sweep kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  const double s = split.train + split.val + split.test;
  if (!(split.train > 0.0 && split.val > 0.0 && split.test > 0.0) ||
      std::abs(s - 1.0) > 1e-9)
    throw ConfigError("split fractions must be positive and sum to 1");
  if (repetitions == 0) throw ConfigError("repetitions must be >= 1");
  if (alpha && !(*alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (rho && !(*rho >= 0.0)) throw ConfigError("rho must be >= 0");
  if (out.empty()) throw ConfigError("out must be a non-empty path");
  if (classifier) {
    if (classifier->w.empty()) throw ConfigError("classifier.w must be non-empty");
    for (double v : classifier->w)
      if (!std::isfinite(v)) throw ConfigError("classifier.w must be finite");
  }
  try {
    train.validate();
    if (scenario) scenario->validate();
    sweep.pdf.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (sweep.trials == 0) throw ConfigError("sweep.trials must be >= 1");
  if (sweep.m == 0) throw ConfigError("sweep.m must be >= 1");
  for (std::size_t m : sweep.m_values)
    if (m == 0) throw ConfigError("sweep.m_values entries must be >= 1");
  for (const auto& [a, b] : sweep.beta_grid)
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("sweep.beta_grid shapes must be > 0");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  ObjectReader r(root, "");
  std::string command;
  r.get("command", command);
  if (!command.empty()) cfg.command = command_from_string(command);

  std::string path;
  if (r.has("dataset")) {
    r.get("dataset", path);
    cfg.dataset = path;
  }
  if (r.has("profile")) {
    r.get("profile", path);
    cfg.profile = path;
  }
  r.get("allow_negative_features", cfg.allow_negative_features);
  if (const json* s = r.raw("scenario"))
    cfg.scenario = parse_scenario(*s, cfg.scenario_seed_given);

  if (const json* t = r.raw("train")) {
    ObjectReader tr(*t, "train");
    tr.get("learning_rate", cfg.train.learning_rate);
    tr.get("batch_size", cfg.train.batch_size);
    tr.get("epochs", cfg.train.epochs);
    tr.get("lambda_reg", cfg.train.lambda_reg);
    tr.get("temp_softsort", cfg.train.smooth.temp_softsort);
    tr.get("temp_softmax", cfg.train.smooth.temp_softmax);
    tr.get("rho_floor", cfg.train.smooth.rho_floor);
    tr.get("adam_beta1", cfg.train.adam_beta1);
    tr.get("adam_beta2", cfg.train.adam_beta2);
    tr.get("adam_epsilon", cfg.train.adam_epsilon);
    tr.finish();
  }
  if (r.has("alpha")) {
    double a = 0.0;
    r.get("alpha", a);
    cfg.alpha = a;
  }
  if (const json* s = r.raw("split")) {
    ObjectReader sr(*s, "split");
    sr.get("train", cfg.split.train);
    sr.get("val", cfg.split.val);
    sr.get("test", cfg.split.test);
    sr.finish();
  }
  r.get("repetitions", cfg.repetitions);
  {
    std::size_t seed = cfg.seed;
    r.get("seed", seed);
    cfg.seed = seed;
  }
  r.get("out", cfg.out);
  if (const json* c = r.raw("classifier")) {
    ObjectReader cr(*c, "classifier");
    LinearClassifier h;
    if (!cr.has("w")) throw ConfigError("classifier.w is required");
    cr.get("w", h.w);
    cr.get("tau", h.tau);
    cr.finish();
    cfg.classifier = std::move(h);
  }
  if (r.has("rho")) {
    double v = 0.0;
    r.get("rho", v);
    cfg.rho = v;
  }
  std::string movement;
  r.get("movement", movement);
  if (!movement.empty()) {
    if (movement == "directional") cfg.movement = MovementMode::directional;
    else if (movement == "single_feature") cfg.movement = MovementMode::single_feature;
    else throw ConfigError("movement must be 'directional' or 'single_feature'");
  }
  r.get("feature", cfg.feature);
  if (const json* s = r.raw("sweep")) {
    ObjectReader sr(*s, "sweep");
    std::string kind;
    sr.get("kind", kind);
    if (!kind.empty()) cfg.sweep.kind = sweep_kind_from_string(kind);
    sr.get("values", cfg.sweep.values);
    sr.get("taus", cfg.sweep.taus);
    if (const json* g = sr.raw("beta_grid")) {
      if (!g->is_array()) throw ConfigError("sweep.beta_grid must be an array of [a, b] pairs");
      cfg.sweep.beta_grid.clear();
      for (const auto& cell : *g) {
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
            !cell[1].is_number())
          throw ConfigError("sweep.beta_grid must be an array of [a, b] pairs");
        cfg.sweep.beta_grid.emplace_back(cell[0].get<double>(), cell[1].get<double>());
      }
    }
    sr.get("m_values", cfg.sweep.m_values);
    sr.get("m", cfg.sweep.m);
    sr.get("trials", cfg.sweep.trials);
    sr.get("b0", cfg.sweep.b0);
    if (const json* p = sr.raw("pdf")) cfg.sweep.pdf = parse_pdf(*p);
    sr.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ojson j;
  j["command"] = to_string(cfg.command);
  j["dataset"] = cfg.dataset ? ojson(*cfg.dataset) : ojson(nullptr);
  j["profile"] = cfg.profile ? ojson(*cfg.profile) : ojson(nullptr);
  j["allow_negative_features"] = cfg.allow_negative_features;
  if (cfg.scenario) j["scenario"] = scenario_json(resolved_scenario(cfg));
  else j["scenario"] = nullptr;
  ojson t;
  t["learning_rate"] = cfg.train.learning_rate;
  t["batch_size"] = cfg.train.batch_size;
  t["epochs"] = cfg.train.epochs;
  t["lambda_reg"] = cfg.train.lambda_reg;
  t["temp_softsort"] = cfg.train.smooth.temp_softsort;
  t["temp_softmax"] = cfg.train.smooth.temp_softmax;
  t["rho_floor"] = cfg.train.smooth.rho_floor;
  t["adam_beta1"] = cfg.train.adam_beta1;
  t["adam_beta2"] = cfg.train.adam_beta2;
  t["adam_epsilon"] = cfg.train.adam_epsilon;
  j["train"] = t;
  j["alpha"] = cfg.alpha ? ojson(*cfg.alpha) : ojson(nullptr);
  j["split"] = {{"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}};
  j["repetitions"] = cfg.repetitions;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  if (cfg.classifier) {
    ojson c;
    c["w"] = cfg.classifier->w;
    c["tau"] = cfg.classifier->tau;
    j["classifier"] = c;
  } else {
    j["classifier"] = nullptr;
  }
  j["rho"] = cfg.rho ? ojson(*cfg.rho) : ojson(nullptr);
  j["movement"] = cfg.movement == MovementMode::single_feature ? "single_feature" : "directional";
  j["feature"] = cfg.feature;
  ojson s;
  s["kind"] = to_string(cfg.sweep.kind);
  s["values"] = cfg.sweep.values;
  s["taus"] = cfg.sweep.taus;
  ojson grid = ojson::array();
  for (const auto& [a, b] : cfg.sweep.beta_grid) grid.push_back({a, b});
  s["beta_grid"] = grid;
  s["m_values"] = cfg.sweep.m_values;
  s["m"] = cfg.sweep.m;
  s["trials"] = cfg.sweep.trials;
  s["b0"] = cfg.sweep.b0;
  const PdfSpec& p = cfg.sweep.pdf;
  s["pdf"] = {{"family", pdf_family_name(p.family)}, {"a", p.a}, {"b", p.b},
              {"mu", p.mu}, {"sigma", p.sigma}, {"mu2", p.mu2},
              {"sigma2", p.sigma2}, {"weight", p.weight}, {"lo", p.lo}, {"hi", p.hi}};
  j["sweep"] = s;
  return j.dump();
}

std::array<Dataset, 3> split_dataset(const Dataset& data,
                                     const SplitFractions& f,
                                     std::uint64_t seed, std::size_t rep) {
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(f.val * static_cast<double>(n)));
  if (n_train < 2 || n_val < 1 || n_train + n_val >= n)
    throw InputError("dataset of " + std::to_string(n) +
                     " rows is too small for the requested split");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(mix64(seed) ^ mix64(0x5311700000000000ULL + rep));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(idx[i], idx[pick(rng)]);
  }
  const std::span<const std::size_t> all(idx);
  return {data.subset(all.subspan(0, n_train)),
          data.subset(all.subspan(n_train, n_val)),
          data.subset(all.subspan(n_train + n_val))};
}

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Report body;
  switch (cfg.command) {
    case Command::price: body = run_price(cfg); break;
    case Command::simulate: body = run_simulate(cfg); break;
    case Command::train: body = run_train(cfg); break;
    case Command::eval: body = run_eval(cfg); break;
    case Command::sweep: body = run_sweep(cfg); break;
    case Command::synth: body = run_synth(cfg); break;
  }
  Report rep;
  rep.jsonl = "{\"record\":\"config\",\"config\":" + config_to_json(cfg) + "}\n" + body.jsonl;
  rep.csv = std::move(body.csv);
  rep.files = std::move(body.files);
  return rep;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string());
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    out << body;
  };
  put("results.jsonl", report.jsonl);
  put("aggregates.csv", report.csv);
  for (const auto& [name, body] : report.files) put(name, body);
}

}  // namespace msc
