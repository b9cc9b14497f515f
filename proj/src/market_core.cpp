#include "msc/market_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msc/errors.hpp"
#include "msc/kernels.hpp"

namespace msc {

Dataset Dataset::from_records(std::span<const UserRecord> records) {
  if (records.empty()) return Dataset{};
  Dataset out(records.front().features.size());
  for (const auto& r : records) out.add(r.features, r.budget, r.label);
  return out;
}

void Dataset::add(std::span<const double> features, double budget,
                  int label) {
  if (features.size() != dim_)
    throw DimensionMismatchError("record has " +
                                 std::to_string(features.size()) +
                                 " features, dataset dimension is " +
                                 std::to_string(dim_));
  for (double v : features)
    if (!std::isfinite(v)) throw InputError("non-finite feature value");
  if (!std::isfinite(budget) || budget < 0.0)
    throw InputError("budget must be finite and non-negative");
  if (label != 0 && label != 1) throw InputError("label must be 0 or 1");
  features_.insert(features_.end(), features.begin(), features.end());
  budgets_.push_back(budget);
  labels_.push_back(label);
}

UserRecord Dataset::record(std::size_t i) const {
  auto x = features(i);
  return {std::vector<double>(x.begin(), x.end()), budgets_[i], labels_[i]};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(dim_);
  out.features_.reserve(indices.size() * dim_);
  out.budgets_.reserve(indices.size());
  out.labels_.reserve(indices.size());
  for (std::size_t i : indices) {
    auto x = features(i);
    out.features_.insert(out.features_.end(), x.begin(), x.end());
    out.budgets_.push_back(budgets_[i]);
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

Dataset Dataset::with_budgets(std::vector<double> budgets) const {
  if (budgets.size() != size())
    throw DimensionMismatchError("budget vector length mismatch");
  for (double b : budgets)
    if (!std::isfinite(b) || b < 0.0)
      throw InputError("budget must be finite and non-negative");
  Dataset out = *this;
  out.budgets_ = std::move(budgets);
  return out;
}

void check_ingestion_rules(const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features(i))
      if (v < 0.0)
        throw InvariantViolation(
            "row " + std::to_string(i + 1) + ": negative feature value", i + 1);
    if (!(data.budget(i) > 0.0))
      throw InvariantViolation(
          "row " + std::to_string(i + 1) + ": budget must be > 0", i + 1);
  }
}

double LinearClassifier::norm() const {
  double acc = 0.0;
  for (double v : w) acc += v * v;
  return std::sqrt(acc);
}

double LinearClassifier::score(std::span<const double> x) const {
  if (x.size() != w.size())
    throw DimensionMismatchError("feature vector has " +
                                 std::to_string(x.size()) +
                                 " entries, classifier expects " +
                                 std::to_string(w.size()));
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * x[k];
  return acc + tau;
}

int predict(const LinearClassifier& h, std::span<const double> x) {
  return h.score(x) >= 0.0 ? +1 : -1;
}

double demand_units(const LinearClassifier& h, std::span<const double> x) {
  const double wn = h.norm();
  if (!(wn > 0.0)) throw DegenerateClassifierError("classifier has w = 0");
  const double s = h.score(x);
  return s >= 0.0 ? 0.0 : -s / wn;
}

DemandProfile make_profile(std::span<const double> units,
                           std::span<const double> budgets) {
  if (units.size() != budgets.size())
    throw DimensionMismatchError("units and budgets differ in length");
  DemandProfile p;
  p.source_size = units.size();
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!(units[i] > 0.0) || !(budgets[i] > 0.0)) continue;
    p.points.push_back({units[i], budgets[i], units[i] / budgets[i], i});
  }
  return p;
}

DemandProfile demand_profile(const LinearClassifier& h, const Dataset& data) {
  const double wn = h.norm();
  if (!(wn > 0.0)) throw DegenerateClassifierError("classifier has w = 0");
  if (!data.empty() && data.dim() != h.dim())
    throw DimensionMismatchError("dataset and classifier dimensions differ");
  std::vector<double> s(data.size());
  kernels::omp::scores(data.feature_matrix(), data.dim(), h.w, h.tau, s);
  DemandProfile p;
  p.source_size = data.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= 0.0) continue;
    const double u = -s[i] / wn;
    const double b = data.budget(i);
    if (!(u > 0.0) || !(b > 0.0)) continue;
    p.points.push_back({u, b, u / b, i});
  }
  return p;
}

double gini(std::span<const double> values) {
  if (values.empty()) throw InputError("gini of an empty list");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v)
    if (!(x >= 0.0)) throw InputError("gini requires non-negative values");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double total = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    total += v[i];
    // sum_ij |v_i - v_j| = 2 sum_i (2i - n + 1) v_(i)
    weighted += (2.0 * static_cast<double>(i) - n + 1.0) * v[i];
  }
  if (!(total > 0.0))
    throw UndefinedInequalityError("gini undefined for all-zero values");
  const double mean = total / n;
  return (2.0 * weighted) / (2.0 * n * n * mean);
}

}  // namespace msc
