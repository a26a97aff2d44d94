#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "htcov/order_stats.hpp"

using namespace htcov;

namespace {

std::vector<double> random_values(std::size_t len, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(len);
  for (auto& x : v) x = ex(eng);
  return v;
}

}  // namespace

TEST_CASE("kmax on exact cases") {
  const std::vector<double> v{3, 1, 2};
  const std::vector<std::size_t> all{0, 1, 2};
  CHECK(kmax(v, all, 1) == 3.0);
  CHECK(kmax(v, all, 4) == 0.0);
  CHECK(kmax(v, 2) == 2.0);
  const std::vector<double> w{5, 5, 1};
  const std::vector<std::size_t> first_two{0, 1};
  CHECK(kmax(w, first_two, 2) == 5.0);
  CHECK_THROWS_AS(kmax(v, 0), ParameterError);
  const std::vector<std::size_t> bad{5};
  CHECK_THROWS_AS(kmax(v, bad, 1), ParameterError);
}

TEST_CASE("kmax agrees with a full sort above the selection cutoff") {
  for (std::size_t len : {10u, 64u, 65u, 500u}) {
    auto v = random_values(len, len);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t k = 1; k <= len; k += 7) CHECK(kmax(v, k) == sorted[k - 1]);
  }
}

TEST_CASE("kmax monotonicity in k and J") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto v = random_values(30, seed);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < 30; ++i) {
      large.push_back(i);
      if (i % 3 != 0) small.push_back(i);
    }
    for (std::size_t k = 1; k <= 25; ++k) {
      CHECK(kmax(v, large, k + 1) <= kmax(v, large, k));
      CHECK(kmax(v, small, k) <= kmax(v, large, k));
    }
  }
}

TEST_CASE("tail_l2_norm") {
  const std::vector<double> v{3, 2, 1};
  CHECK(tail_l2_norm(v, 1) == Catch::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(tail_l2_norm(v, 3) == 0.0);
  const std::vector<double> c(9, 2.0);
  CHECK(tail_l2_norm(c, 0) == Catch::Approx(6.0));
  CHECK_THROWS_AS(tail_l2_norm(std::vector<double>{-1.0}, 0), ContractError);
  CHECK_THROWS_AS(tail_l2_norm(v, 4), ParameterError);
}

TEST_CASE("tail split identity and the per-vector kmax inequality") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto v = random_values(25, 100 + seed);
    double total = 0.0;
    for (double x : v) total += x * x;
    for (std::size_t n = 0; n <= 25; n += 5) {
      double head = 0.0;
      for (std::size_t i = 1; i <= n; ++i) head += std::pow(kmax(v, i), 2);
      CHECK(std::pow(tail_l2_norm(v, n), 2) + head == Catch::Approx(total).epsilon(1e-10));
    }
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
    for (std::size_t m = 1; m <= 10; ++m) {
      for (std::size_t k = m; k <= 20; ++k) {
        double acc = 0.0;
        for (std::size_t j = m + 1; j <= k; ++j) acc += kmax(sq, j);
        CHECK(std::sqrt(acc) <= std::sqrt(static_cast<double>(k)) * kmax(v, m));
      }
    }
  }
}

TEST_CASE("order_stat_tail_bound direct formula") {
  CHECK(order_stat_tail_bound(1, 2, 10, 2, 5).raw == Catch::Approx(std::pow(10 * std::numbers::e / 50, 2)));
  CHECK(order_stat_tail_bound(1, 2, 10, 2, 5).raw == Catch::Approx(0.295562244).epsilon(1e-8));
  CHECK(order_stat_tail_bound(1, 1, 1, 1, std::numbers::e).raw == Catch::Approx(1.0));
  CHECK(order_stat_tail_bound(1, 2, 10, 1, 10).raw == Catch::Approx(0.271828183).epsilon(1e-8));
  CHECK(order_stat_tail_bound(5, 1, 10, 1, 1).clamped == 1.0);
  CHECK_THROWS_AS(order_stat_tail_bound(1, 2, 10, 11, 5), ParameterError);
  CHECK_THROWS_AS(order_stat_tail_bound(0.5, 2, 10, 1, 5), ParameterError);
}

TEST_CASE("norm_tail_bound direct formula") {
  CHECK(norm_tail_bound(1, 4, 4, 10).raw == Catch::Approx(0.0016));
  CHECK(norm_tail_bound(1, 4, 1, 1).raw == Catch::Approx(1.0));
  CHECK(norm_tail_bound(2, 3, 9, 30).raw == Catch::Approx(0.002));
  CHECK_THROWS_AS(norm_tail_bound(1, 2, 4, 1), ParameterError);
}

TEST_CASE("order-statistics Monte Carlo validators pass on a reduced budget") {
  OrderStatsSuiteConfig cfg;
  cfg.seed = 5;
  cfg.trials = 3000;
  cfg.tail_trials = 20;
  const auto kmax_rep = validate_order_stat_bound(cfg);
  CHECK(kmax_rep.pass);
  CHECK_FALSE(kmax_rep.rows.empty());
  const auto tail = validate_tail_l2_constant(cfg);
  CHECK(tail.pass);
}
