#include <doctest.h>

#include <random>

#include "msc/errors.hpp"
#include "msc/evaluation.hpp"
#include "msc/pricing_exact.hpp"
#include "test_util.hpp"

using namespace msc;

namespace {
Dataset one_d(std::initializer_list<std::tuple<double, double, int>> rows) {
  Dataset d(1);
  for (const auto& [x, b, y] : rows) d.add(std::vector<double>{x}, b, y);
  return d;
}
}  // namespace

TEST_CASE("welfare") {
  const LinearClassifier h{{1.0}, -1.0};
  CHECK(welfare(h, one_d({{0.0, 0.1, 0}, {-1.0, 0.1, 1}}), 1.0) == 0.0);
  CHECK(welfare(h, one_d({{2.0, 2.0, 1}}), 1.0) == doctest::Approx(1.0));
  CHECK(welfare(h, one_d({{0.0, 2.0, 1}}), 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(welfare(h, Dataset(1), 1.0), InputError);
}

TEST_CASE("social burden") {
  const LinearClassifier h{{1.0}, -2.0};
  CHECK(social_burden(h, one_d({{3.0, 1.0, 1}}), 0.5) == 0.0);
  CHECK(social_burden(h, one_d({{0.0, 4.0, 1}, {0.0, 1.0, 0}}), 0.5) == doctest::Approx(0.25));
  CHECK(social_burden(h, one_d({{0.0, 4.0, 1}}), 0.0) == 0.0);
  CHECK_THROWS_AS(social_burden(h, one_d({{0.0, 4.0, 0}}), 0.5), InputError);
}

TEST_CASE("three-user worked case") {
  // h: x >= 1. user0 (y=1) u=1 b=1; user1 (y=0) u=0.5 b=1; user2 (y=1) u=2 b=1.
  const LinearClassifier h{{1.0}, -1.0};
  const Dataset d = one_d({{0.0, 1.0, 1}, {0.5, 1.0, 0}, {-1.0, 1.0, 1}});
  const Metrics m = evaluate(h, d, 1.0);
  // at rho=1: user0 pays 1 (moves), user1 pays 0.5 (moves), user2 cannot
  CHECK(m.n_movers == 2);
  CHECK(m.accuracy == doctest::Approx(1.0 / 3.0));
  CHECK(m.welfare == doctest::Approx((1.0 - 1.0 + 1.0 - 0.5) / 3.0));
  CHECK(m.burden == doctest::Approx((1.0 + 2.0) / 2.0));
  CHECK(m.crossed_pos_ratio == doctest::Approx(0.5));
  CHECK(m.crossed_neg_ratio == doctest::Approx(1.0));
  CHECK(m.rho_used == 1.0);
}

TEST_CASE("limits and ranges") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Dataset d = testutil::random_dataset(rng, 80, 3);
    const LinearClassifier h{{nd(rng), nd(rng), nd(rng)}, nd(rng)};
    const Metrics inf = evaluate(h, d, 1e300);
    CHECK(inf.accuracy == plain_accuracy(h, d));
    CHECK(inf.n_movers == 0);

    const Metrics free = evaluate(h, d, 0.0);
    std::size_t pos = 0;
    for (int l : d.labels()) pos += l;
    CHECK(free.accuracy == doctest::Approx(double(pos) / d.size()));

    const double rho = long_term_price(h, d);
    const Metrics lt = evaluate(h, d, rho);
    CHECK(lt.n_movers == exact_price(demand_profile(h, d)).buyers);
    for (const Metrics& m : {inf, free, lt}) {
      CHECK(m.welfare >= 0.0);
      CHECK(m.welfare <= 1.0 + 1e-12);
      CHECK(m.burden >= 0.0);
      CHECK(m.crossed_pos_ratio >= 0.0);
      CHECK(m.crossed_pos_ratio <= 1.0);
      CHECK(m.crossed_neg_ratio >= 0.0);
      CHECK(m.crossed_neg_ratio <= 1.0);
    }
  }
}

TEST_CASE("short and long horizons") {
  std::mt19937_64 rng(52);
  const Dataset d = testutil::random_dataset(rng, 100, 2);
  const LinearClassifier h{{1.0, 0.5}, 0.2};
  const double rho = long_term_price(h, d);
  const auto [s, l] = evaluate_short_long(h, d, rho);
  CHECK(s.accuracy == l.accuracy);
  CHECK(s.rho_used == l.rho_used);

  // shift every negative-side user so its distance to the boundary doubles
  Dataset shifted(2);
  const double n = h.norm();
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<double> x(d.features(i).begin(), d.features(i).end());
    const double sc = h.score(x);
    if (sc < 0.0)
      for (std::size_t k = 0; k < 2; ++k) x[k] += sc * h.w[k] / (n * n);
    shifted.add(x, d.budget(i), d.label(i));
  }
  const auto [s2, l2] = evaluate_short_long(h, shifted, rho);
  CHECK(l2.rho_used == doctest::Approx(rho / 2).epsilon(1e-12));
  CHECK(l2.n_movers == l.n_movers);

  // empty demand: both horizons are the pre-market metrics
  const LinearClassifier all_pos{{1.0, 0.0}, 1e6};
  const auto [s3, l3] = evaluate_short_long(all_pos, d, 3.0);
  CHECK(s3.accuracy == plain_accuracy(all_pos, d));
  CHECK(l3.accuracy == plain_accuracy(all_pos, d));
}
