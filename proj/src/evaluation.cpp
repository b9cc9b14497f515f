#include "msc/evaluation.hpp"

#include <vector>

#include "msc/errors.hpp"
#include "msc/kernels.hpp"
#include "msc/pricing_exact.hpp"

namespace msc {

namespace {

struct Tally {
  double total_budget = 0.0;
  double welfare_num = 0.0;
  double pos_budget = 0.0;
  double burden_num = 0.0;
  std::size_t correct = 0;
  std::size_t neg_side_pos = 0, neg_side_neg = 0;
  std::size_t crossed_pos = 0, crossed_neg = 0;
  std::size_t movers = 0;
};

Tally tally(const LinearClassifier& h, const Dataset& data, double rho) {
  const MarketOutcome out = simulate_market(h, data, rho);
  std::vector<double> s(data.size());
  kernels::omp::scores(data.feature_matrix(), data.dim(), h.w, h.tau, s);
  const double wn = h.norm();
  Tally t;
  // fixed index order for every reduction
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double b = data.budget(i);
    const bool pre_pos = s[i] >= 0.0;
    const bool moved = out.moved[i] != 0;
    // movers land on the boundary, which counts as positive
    const bool post_pos = pre_pos || moved;
    const int label = data.label(i);
    t.total_budget += b;
    t.welfare_num += (post_pos ? b : 0.0) - out.spend[i];
    if ((post_pos ? 1 : 0) == label) ++t.correct;
    if (moved) ++t.movers;
    if (label == 1) {
      t.pos_budget += b;
      if (!pre_pos) t.burden_num += rho * (-s[i] / wn);
    }
    if (!pre_pos) {
      if (label == 1) {
        ++t.neg_side_pos;
        if (moved) ++t.crossed_pos;
      } else {
        ++t.neg_side_neg;
        if (moved) ++t.crossed_neg;
      }
    }
  }
  return t;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double welfare(const LinearClassifier& h, const Dataset& data, double rho) {
  const Tally t = tally(h, data, rho);
  if (!(t.total_budget > 0.0))
    throw InputError("welfare undefined for zero total budget");
  return t.welfare_num / t.total_budget;
}

double social_burden(const LinearClassifier& h, const Dataset& data,
                     double rho) {
  const Tally t = tally(h, data, rho);
  if (!(t.pos_budget > 0.0))
    throw InputError("social burden undefined: positives have no budget");
  return t.burden_num / t.pos_budget;
}

Metrics evaluate(const LinearClassifier& h, const Dataset& data, double rho) {
  const Tally t = tally(h, data, rho);
  Metrics m;
  m.accuracy = ratio(t.correct, data.size());
  m.welfare = t.total_budget > 0.0 ? t.welfare_num / t.total_budget : 0.0;
  m.burden = t.pos_budget > 0.0 ? t.burden_num / t.pos_budget : 0.0;
  m.crossed_pos_ratio = ratio(t.crossed_pos, t.neg_side_pos);
  m.crossed_neg_ratio = ratio(t.crossed_neg, t.neg_side_neg);
  m.rho_used = rho;
  m.n_movers = t.movers;
  return m;
}

double plain_accuracy(const LinearClassifier& h, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::vector<double> s(data.size());
  kernels::omp::scores(data.feature_matrix(), data.dim(), h.w, h.tau, s);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if ((s[i] >= 0.0 ? 1 : 0) == data.label(i)) ++correct;
  return ratio(correct, data.size());
}

double long_term_price(const LinearClassifier& h, const Dataset& data) {
  return exact_price(demand_profile(h, data)).rho;
}

std::pair<Metrics, Metrics> evaluate_short_long(const LinearClassifier& h,
                                                const Dataset& test,
                                                double rho_train) {
  return {evaluate(h, test, rho_train),
          evaluate(h, test, long_term_price(h, test))};
}

}  // namespace msc
