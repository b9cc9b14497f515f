#pragma once

// Users, datasets, linear classifiers, and the one-dimensional demand they
// induce. Everything downstream (pricing, responses, training) consumes the
// DemandProfile built here.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace msc {

/// One market participant. `label` is stored as {0,1}.
struct UserRecord {
  std::vector<double> features;
  double budget = 1.0;
  int label = 0;
};

/// Maps a stored {0,1} label to the {-1,+1} convention used in losses.
constexpr int signed_label(int label) noexcept { return 2 * label - 1; }

/// Users stored column-friendly: features row-major (size() x dim()).
///
/// In-memory datasets accept any finite feature values and budgets >= 0 so
/// that synthetic constructions (centred Gaussians, zero-budget users that
/// can never buy) can be represented. The stricter file-ingestion rules
/// (features >= 0, budgets > 0) are applied by `load_dataset` and
/// `check_ingestion_rules`.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : dim_(dim) {}

  static Dataset from_records(std::span<const UserRecord> records);

  /// Appends a user; throws InputError on dimension mismatch, non-finite
  /// values, negative budget, or a label outside {0,1}.
  void add(std::span<const double> features, double budget, int label);

  std::size_t size() const noexcept { return budgets_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return budgets_.empty(); }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  double budget(std::size_t i) const { return budgets_[i]; }
  int label(std::size_t i) const { return labels_[i]; }
  int y(std::size_t i) const { return signed_label(labels_[i]); }
  UserRecord record(std::size_t i) const;

  std::span<const double> feature_matrix() const noexcept { return features_; }
  std::span<const double> budgets() const noexcept { return budgets_; }
  std::span<const int> labels() const noexcept { return labels_; }

  /// Copy of the rows at `indices`, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Same users with budgets replaced.
  Dataset with_budgets(std::vector<double> budgets) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<double> budgets_;
  std::vector<int> labels_;
};

/// Throws InvariantViolation (row is 1-based) unless every feature is >= 0
/// and every budget is > 0.
void check_ingestion_rules(const Dataset& data);

/// h(x) = sign(w.x + tau) with sign(0) = +1.
struct LinearClassifier {
  std::vector<double> w;
  double tau = 0.0;

  std::size_t dim() const noexcept { return w.size(); }
  double norm() const;
  double score(std::span<const double> x) const;

  bool operator==(const LinearClassifier&) const = default;
};

/// +1 iff w.x + tau >= 0. Throws DimensionMismatchError.
int predict(const LinearClassifier& h, std::span<const double> x);

/// Euclidean distance from a negatively classified x to the boundary, 0 for
/// positively classified x. Throws DegenerateClassifierError when ‖w‖ = 0.
double demand_units(const LinearClassifier& h, std::span<const double> x);

/// Affordability shared by pricing and simulation: a user with `units` of
/// demand buys at price rho iff units/budget <= 1/rho. Users with budget <= 0
/// never buy; rho = 0 is free for everyone else. Written in terms of the
/// normalized demand so that the pricing scan, the revenue curve, and the
/// market simulation draw exactly the same buyer set.
inline bool affordable(double rho, double units, double budget) noexcept {
  if (!(budget > 0.0)) return false;
  if (rho <= 0.0) return true;
  return units / budget <= 1.0 / rho;
}

struct DemandPoint {
  double units = 0.0;       // u > 0
  double budget = 0.0;      // b > 0
  double normalized = 0.0;  // u / b
  std::size_t origin_index = 0;
};

struct DemandProfile {
  std::vector<DemandPoint> points;
  std::size_t source_size = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// Builds a profile directly from (units, budget) pairs; origin indices are
/// positions. Pairs with units <= 0 or budget <= 0 are skipped.
DemandProfile make_profile(std::span<const double> units,
                           std::span<const double> budgets);

/// One point per user with u > 0 and b > 0 (zero-budget users can never buy
/// and carry no price information). Throws DegenerateClassifierError and
/// DimensionMismatchError.
DemandProfile demand_profile(const LinearClassifier& h, const Dataset& data);

/// Population mean-absolute-difference Gini: sum_ij |b_i - b_j| / (2 n^2 mean).
/// Throws InputError on empty input or negative entries and
/// UndefinedInequalityError when all entries are zero.
double gini(std::span<const double> values);

}  // namespace msc
