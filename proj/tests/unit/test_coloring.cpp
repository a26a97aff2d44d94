#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "htcov/coloring.hpp"

using namespace htcov;

namespace {

GramMatrix gram_of(std::initializer_list<std::initializer_list<double>> rows) {
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return gram(m);
}

/// Five unit vectors: 0.45 on (0,3), (1,2), (2,3), 0.3 on (0,1), vertex 4 isolated.
GramMatrix first_fit_counterexample() {
  Matrix g = Matrix::Identity(5, 5);
  auto set = [&](int i, int j, double v) { g(i, j) = g(j, i) = v; };
  set(0, 3, 0.45);
  set(1, 2, 0.45);
  set(2, 3, 0.45);
  set(0, 1, 0.3);
  return GramMatrix(g);
}

}  // namespace

TEST_CASE("build_graph on exact cases") {
  const auto twin = gram_of({{1, 0}, {1, 0}});
  const auto g = build_graph(twin, 0.5);
  CHECK(g.max_norm == 1.0);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == IndexPair{0, 1});
  CHECK(build_graph(twin, 2.0).edges.empty());
  const auto ortho = gram_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  for (double H : {0.01, 1.0, 5.0}) CHECK(build_graph(ortho, H).edges.empty());
  CHECK_THROWS_AS(build_graph(twin, 0.0), ParameterError);
}

TEST_CASE("greedy_color on exact cases") {
  const auto twin = gram_of({{1, 0}, {1, 0}});
  auto p = greedy_color(twin, 0.5);
  CHECK(p.colors == std::vector<int>{1, 2});
  CHECK(p.color_count() == 2);
  p = greedy_color(twin, 2.0);
  CHECK(p.colors == std::vector<int>{1, 1});
  CHECK(p.classes.size() == 1);
  const auto three = gram_of({{1, 0}, {0, 1}, {1, 0}});
  CHECK(greedy_color(three, 0.5).colors == std::vector<int>{1, 1, 2});
}

TEST_CASE("validate_coloring") {
  const auto twin = gram_of({{1, 0}, {1, 0}});
  ColoringPartition bad;
  bad.classes = {{0, 1}};
  bad.colors = {1, 1};
  const auto v = validate_coloring(twin, 0.5, bad);
  CHECK_FALSE(v.valid);
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0] == IndexPair{0, 1});
  ColoringPartition single;
  single.classes = {{0}};
  single.colors = {1};
  CHECK(validate_coloring(gram_of({{2, 1}}), 0.1, single).valid);
  ColoringPartition missing;
  missing.classes = {{0}};
  CHECK_FALSE(validate_coloring(twin, 0.5, missing).valid);
}

TEST_CASE("greedy colorings are valid, interval-labelled and bounded below by chi") {
  const std::vector<DistributionSpec> specs{DistributionSpec::gaussian(3), DistributionSpec::pareto(3, 3.0),
                                            DistributionSpec::student_t(3, 3.0),
                                            DistributionSpec::spherical_pareto(3, 2.5),
                                            DistributionSpec::coordinate_discrete(3)};
  std::size_t checked = 0;
  for (std::size_t f = 0; f < specs.size(); ++f) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto a = sample_matrix(specs[f], 3, 10, derive_seed(77, {f, seed}));
      const auto g = gram(a);
      for (double H : {0.05, 0.2, 0.5, 1.0, 3.0}) {
        const auto part = greedy_color(g, H);
        REQUIRE(validate_coloring(g, H, part).valid);
        std::set<int> used(part.colors.begin(), part.colors.end());
        CHECK(*used.begin() == 1);
        CHECK(static_cast<std::size_t>(*used.rbegin()) == used.size());
        CHECK(part.color_count() <= static_cast<std::size_t>(a.N()));
        const auto graph = build_graph(g, H);
        CHECK(part.color_count() >= exact_chromatic_number(graph));
        // First fit compares against H ||X_j||, so only a bound by the smallest norm forces one color.
        double min_norm = g.norm(0), max_off = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          min_norm = std::min(min_norm, g.norm(i));
          for (Eigen::Index j = i + 1; j < g.size(); ++j) max_off = std::max(max_off, std::abs(g(i, j)));
        }
        if (max_off <= H * min_norm) CHECK(part.color_count() == 1);
        ++checked;
      }
    }
  }
  CHECK(checked == 500);
}

TEST_CASE("exact chromatic number on small graphs") {
  ThresholdGraph tri;
  tri.N = 3;
  tri.edges = {{0, 1}, {0, 2}, {1, 2}};
  CHECK(exact_chromatic_number(tri) == 3);
  ThresholdGraph c4;
  c4.N = 4;
  c4.edges = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
  CHECK(exact_chromatic_number(c4) == 2);
  ThresholdGraph big;
  big.N = 13;
  CHECK_THROWS_AS(exact_chromatic_number(big), ParameterError);
}

TEST_CASE("first-fit count is not monotone in H") {
  const auto g = first_fit_counterexample();
  REQUIRE(detail::dense_extremes(g.entries()).min > 0.0);
  const auto low = greedy_color(g, 0.25);
  const auto high = greedy_color(g, 0.35);
  CHECK(validate_coloring(g, 0.25, low).valid);
  CHECK(validate_coloring(g, 0.35, high).valid);
  CHECK(low.color_count() == 2);
  CHECK(high.color_count() == 3);
  // The chromatic number itself does not increase.
  CHECK(exact_chromatic_number(build_graph(g, 0.35)) <= exact_chromatic_number(build_graph(g, 0.25)));
}

TEST_CASE("chromatic_tail_bound direct formula") {
  CHECK(chromatic_tail_bound(1, 10, 10, 4, 4, 2).raw == Catch::Approx(1.6e-5).epsilon(1e-12));
  CHECK(chromatic_tail_bound(1, 1, 1, 4, 1, 2).raw == Catch::Approx(1.0));
  const auto b = chromatic_tail_bound(2, 100, 10, 3, 9, 2);
  CHECK(b.raw == Catch::Approx(1.08).epsilon(1e-12));
  CHECK(b.clamped == 1.0);
  CHECK_THROWS_AS(chromatic_tail_bound(1, 10, 10, 4, 4, 1), ParameterError);
}

TEST_CASE("default_threshold") {
  CHECK(default_threshold(1, 16, 4, 4) == Catch::Approx(2.0 * std::sqrt(2.0) / std::log(4.0)).epsilon(1e-14));
  CHECK(default_threshold(1, 16, 4, 4) == Catch::Approx(2.0402788932).epsilon(1e-9));
  // High-precision recomputation of (1024)^{1/8} 32^{3/8} / ln 32.
  CHECK(default_threshold(1, 1024, 32, 8) == Catch::Approx(2.517232156).epsilon(1e-9));
  for (double p : {3.0, 4.0, 8.0}) {
    CHECK(default_threshold(std::pow(2.0, p), 100, 10, p) == Catch::Approx(2.0 * default_threshold(1, 100, 10, p)));
  }
  CHECK_THROWS_AS(default_threshold(1, 10, 1, 4), ParameterError);
}

TEST_CASE("coloring suite on a reduced budget") {
  ColoringSuiteConfig cfg;
  cfg.trials = 100;
  cfg.seed = 4;
  const auto rep = run_coloring_suite(cfg);
  CHECK(rep.pass);
  CHECK(rep.csv_header == "n,N,p,H,trial,color_count,bound_m,bound_value,exceeded_flag");
  CHECK_FALSE(rep.rows.empty());
}
