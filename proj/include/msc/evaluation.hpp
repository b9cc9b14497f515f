#pragma once

#include <cstddef>
#include <utility>

#include "msc/market_core.hpp"
#include "msc/response.hpp"

namespace msc {

struct Metrics {
  double accuracy = 0.0;          // post-response predictions vs labels
  double welfare = 0.0;           // budget-normalized profit
  double burden = 0.0;            // positives' cost to the boundary / B+
  double crossed_pos_ratio = 0.0; // movers among y=1 users predicted -1
  double crossed_neg_ratio = 0.0; // movers among y=0 users predicted -1
  double rho_used = 0.0;
  std::size_t n_movers = 0;
};

/// (1/B) sum_i [b_i 1{h(x_i^h) = +1} - cost_i], B = sum_i b_i.
/// Throws InputError when B = 0.
double welfare(const LinearClassifier& h, const Dataset& data, double rho);

/// (1/B+) sum_{y_i = 1} rho * u_i with B+ the positives' total budget; the
/// cost to the boundary ignores budgets. Throws InputError when B+ = 0.
double social_burden(const LinearClassifier& h, const Dataset& data,
                     double rho);

/// Simulates the market at rho and reports every metric. Welfare/burden
/// report 0 when their normalizer is 0.
Metrics evaluate(const LinearClassifier& h, const Dataset& data, double rho);

/// Accuracy of h without any market (no user moves).
double plain_accuracy(const LinearClassifier& h, const Dataset& data);

/// short: frozen train-time price; long: exact price re-equilibrated on
/// `test` under h.
std::pair<Metrics, Metrics> evaluate_short_long(const LinearClassifier& h,
                                                const Dataset& test,
                                                double rho_train);

/// Exact price of the market h induces on `data` (0 when nobody demands).
double long_term_price(const LinearClassifier& h, const Dataset& data);

}  // namespace msc
