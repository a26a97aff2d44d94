#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "htcov/nets.hpp"

using namespace htcov;

TEST_CASE("for_each_subset enumerates binomial(n, k) sorted subsets") {
  std::vector<std::size_t> pool{2, 3, 5, 7, 11, 13};
  for (std::size_t k = 0; k <= 7; ++k) {
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> first;
    for_each_subset(pool, k, [&](std::span<const std::size_t> s) {
      std::vector<std::size_t> v(s.begin(), s.end());
      CHECK(std::is_sorted(v.begin(), v.end()));
      if (seen.empty()) first = v;
      seen.insert(v);
    });
    CHECK(static_cast<double>(seen.size()) == binomial(pool.size(), k));
    if (k >= 1 && k <= 6) CHECK(first == std::vector<std::size_t>(pool.begin(), pool.begin() + static_cast<long>(k)));
  }
  CHECK(binomial(12, 4) == 495.0);
  CHECK(binomial(3, 5) == 0.0);
}

TEST_CASE("one-dimensional nets are {+1, -1}") {
  for (double rho : {0.1, 0.5, 1.0}) {
    const auto net = thinned_sphere_net(1, rho);
    REQUIRE(net.points.cols() == 2);
    CHECK(std::set<double>{net.points(0, 0), net.points(0, 1)} == std::set<double>{-1.0, 1.0});
  }
  const auto sparse = build_sparse_net(2, 1, 1.0);
  CHECK(sparse.cardinality() == 4.0);
  CHECK(sparse.C_net == Catch::Approx(2.0));
  std::set<std::pair<std::size_t, double>> pts;
  sparse.for_each_point([&](std::span<const std::size_t> s, const auto& c) {
    REQUIRE(s.size() == 1);
    pts.insert({s[0], c[0]});
  });
  CHECK(pts == std::set<std::pair<std::size_t, double>>{{0, -1.0}, {0, 1.0}, {1, -1.0}, {1, 1.0}});
}

TEST_CASE("net points lie on the unit sphere") {
  for (std::size_t d = 1; d <= 4; ++d) {
    const auto net = thinned_sphere_net(d, 0.4);
    for (Eigen::Index c = 0; c < net.points.cols(); ++c) CHECK(net.points.col(c).norm() == Catch::Approx(1.0));
    const auto dense = dense_sphere_net(d, 0.4);
    for (Eigen::Index c = 0; c < dense.points.cols(); ++c) CHECK(dense.points.col(c).norm() == Catch::Approx(1.0));
  }
}

TEST_CASE("circle nets cover every angle within rho") {
  // Oracle: a fine sweep of the circle.
  for (double rho : {0.15, 0.3, 0.7}) {
    const auto thin = thinned_sphere_net(2, rho);
    const auto dense = dense_sphere_net(2, rho);
    double worst_thin = 0.0, worst_dense = 0.0;
    for (int a = 0; a < 20000; ++a) {
      const double th = 2.0 * std::numbers::pi * a / 20000.0;
      const Vector x = Vector{{std::cos(th), std::sin(th)}};
      worst_thin = std::max(worst_thin, std::sqrt((thin.points.colwise() - x).colwise().squaredNorm().minCoeff()));
      worst_dense = std::max(worst_dense, std::sqrt((dense.points.colwise() - x).colwise().squaredNorm().minCoeff()));
    }
    CHECK(worst_thin <= rho);
    CHECK(worst_dense <= rho);
    CHECK(thin.points.cols() <= dense.points.cols() * 4);
  }
}

TEST_CASE("sparse net coverage by random probes") {
  const auto net = build_sparse_net(6, 2, 0.3);
  CHECK(probe_net_coverage(net, 10000, 3) <= 0.3);
  CHECK(net.cardinality() ==
        binomial(6, 1) * net.templates[0].points.cols() + binomial(6, 2) * net.templates[1].points.cols());
  CHECK(net.C_net == Catch::Approx(std::pow(net.cardinality(), 0.5) * 0.3 * 2 / 6));
  const auto net3 = build_sparse_net(8, 3, 0.5);
  CHECK(probe_net_coverage(net3, 10000, 4) <= 0.5);
}

TEST_CASE("random sparse unit vectors") {
  Engine eng = make_engine(8);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_sparse_unit(eng, 9, 3);
    CHECK(p.support.size() == 3);
    CHECK(std::is_sorted(p.support.begin(), p.support.end()));
    CHECK(p.support.back() < 9);
    CHECK(p.coeffs.norm() == Catch::Approx(1.0));
  }
}

TEST_CASE("net envelopes") {
  CHECK_THROWS_AS(thinned_sphere_net(8, 0.05), ParameterError);
  CHECK_THROWS_AS(thinned_sphere_net(0, 0.5), ParameterError);
  CHECK_THROWS_AS(thinned_sphere_net(2, 0.0), ParameterError);
  CHECK_THROWS_AS(dense_sphere_net(6, 0.01), ParameterError);
  CHECK_THROWS_AS(build_sparse_net(13, 2, 0.5), ParameterError);
  CHECK_THROWS_AS(build_sparse_net(10, 5, 0.5), ParameterError);
  CHECK_THROWS_AS(build_sparse_net(3, 4, 0.5), ParameterError);
  CHECK_THROWS_AS(build_sparse_net(6, 2, 1.5), ParameterError);
}
