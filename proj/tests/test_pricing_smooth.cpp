#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "msc/errors.hpp"
#include "msc/pricing_exact.hpp"
#include "msc/pricing_smooth.hpp"
#include "test_util.hpp"

using namespace msc;

namespace {

std::pair<std::vector<double>, std::vector<double>> columns(const DemandProfile& p) {
  std::vector<double> u, b;
  for (const auto& q : p.points) {
    u.push_back(q.units);
    b.push_back(q.budget);
  }
  return {u, b};
}

double rho_of(const std::vector<double>& u, const std::vector<double>& b,
              const SmoothPriceConfig& cfg) {
  return smooth_price(make_profile(u, b), cfg).rho_smooth;
}

}  // namespace

TEST_CASE("soft sort") {
  const auto P = soft_sort(std::vector<double>{2.0, 1.0}, 1e-4);
  CHECK(P[0] == doctest::Approx(0.0));
  CHECK(P[1] == doctest::Approx(1.0));
  CHECK(P[2] == doctest::Approx(1.0));
  CHECK(P[3] == doctest::Approx(0.0));
  const auto E = soft_sort(std::vector<double>{3.0, 3.0}, 0.1);
  for (double v : E) CHECK(v == doctest::Approx(0.5));
  CHECK(soft_sort(std::vector<double>{4.0}, 1.0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(soft_sort(std::vector<double>{1.0}, 0.0), InputError);
  CHECK_THROWS_AS(soft_sort(std::vector<double>{}, 1.0), InputError);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ud(0.0, 5.0);
  std::vector<double> v(17);
  for (auto& x : v) x = ud(rng);
  const auto Q = soft_sort(v, 0.3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) row += Q[i * v.size() + j];
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("smooth price examples") {
  const SmoothPriceConfig cfg;
  const auto one = smooth_price_gradient(make_profile(std::vector<double>{2.5},
                                                      std::vector<double>{1.5}),
                                         cfg);
  CHECK(one.rho_smooth == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(one.d_rho_d_units[0] == doctest::Approx(-1.5 / 6.25).epsilon(1e-12));
  CHECK(one.d_rho_d_budgets[0] == doctest::Approx(1.0 / 2.5).epsilon(1e-12));

  const SmoothPriceConfig cold{1e-3, 1e-3, 1e-12};
  const double r = rho_of({1, 2, 4}, {1, 1, 1}, cold);
  CHECK(std::abs(r - 0.25) / 0.25 <= 1e-3);

  const double same = rho_of({3, 3, 3, 3}, {2, 2, 2, 2}, cfg);
  CHECK(same == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(smooth_price(DemandProfile{}, cfg), EmptyMarketError);
  CHECK_THROWS_AS((SmoothPriceConfig{0.0, 1.0, 1e-12}.validate()), InputError);
}

TEST_CASE("hard limit on tie-free profiles") {
  std::mt19937_64 rng(31);
  const SmoothPriceConfig cold{1e-4, 1e-4, 1e-12};
  for (int t = 0; t < 100; ++t) {
    const DemandProfile p = testutil::tie_free_profile(rng, 64);
    const double exact = exact_price(p).rho;
    CHECK(std::abs(smooth_price(p, cold).rho_smooth - exact) / exact <= 1e-3);
  }
}

TEST_CASE("permutation invariance and scale identity") {
  std::mt19937_64 rng(32);
  const SmoothPriceConfig cfg;
  for (int t = 0; t < 50; ++t) {
    const DemandProfile p = testutil::lognormal_profile(rng, 20);
    auto [u, b] = columns(p);
    const double base = rho_of(u, b, cfg);
    std::vector<std::size_t> perm(u.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> up, bp;
    for (auto i : perm) {
      up.push_back(u[i]);
      bp.push_back(b[i]);
    }
    CHECK(testutil::rel_err(rho_of(up, bp, cfg), base) <= 1e-12);
    for (double alpha : {0.1, 10.0}) {
      std::vector<double> ua = u;
      for (auto& x : ua) x *= alpha;
      CHECK(testutil::rel_err(rho_of(ua, b, cfg) * alpha, base) <= 1e-9);
    }
  }
}

TEST_CASE("smooth price gradient matches central differences") {
  std::mt19937_64 rng(33);
  const SmoothPriceConfig warm{0.05, 0.05, 1e-12};
  for (int t = 0; t < 20; ++t) {
    const DemandProfile p = testutil::tie_free_profile(rng, 8, 1e-2, 0.0);
    auto [u, b] = columns(p);
    const SmoothPriceResult g = smooth_price_gradient(p, warm);
    CHECK(g.rho_smooth == smooth_price(p, warm).rho_smooth);
    for (std::size_t i = 0; i < u.size(); ++i) {
      for (int which = 0; which < 2; ++which) {
        auto& vec = which == 0 ? u : b;
        const double x0 = vec[i], h = 1e-5 * x0;
        vec[i] = x0 + h;
        const double up = rho_of(u, b, warm);
        vec[i] = x0 - h;
        const double dn = rho_of(u, b, warm);
        vec[i] = x0;
        const double fd = (up - dn) / (2 * h);
        const double an = which == 0 ? g.d_rho_d_units[i] : g.d_rho_d_budgets[i];
        CHECK(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3 * g.rho_smooth / x0));
      }
    }
  }
}

TEST_CASE("identical points share partials") {
  const SmoothPriceConfig cfg;
  const auto g = smooth_price_gradient(
      make_profile(std::vector<double>{1.5, 1.5, 3.0}, std::vector<double>{1, 1, 1}), cfg);
  CHECK(g.d_rho_d_units[0] == doctest::Approx(g.d_rho_d_units[1]).epsilon(1e-9));
  CHECK(g.d_rho_d_budgets[0] == doctest::Approx(g.d_rho_d_budgets[1]).epsilon(1e-9));
}
