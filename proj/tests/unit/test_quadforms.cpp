#include <catch_amalgamated.hpp>

#include <cmath>

#include "htcov/quadforms.hpp"

using namespace htcov;

namespace {

GramMatrix twin_gram() {
  RowMatrix a(2, 2);
  a << 1, 0, 1, 0;
  return gram(a);
}

RowMatrix random_rows(std::uint64_t seed, Eigen::Index N, Eigen::Index n) {
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal;
  RowMatrix a(N, n);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(eng);
  }
  return a;
}

}  // namespace

TEST_CASE("f on exact cases") {
  const auto g = twin_gram();
  const IndexSet all{0, 1};
  CHECK(f_value(g, 2, all).value == Catch::Approx(2.0));
  CHECK(f_value(g, 1, all).value == Catch::Approx(1.0));
  CHECK(f_value(g, 5, all).value == Catch::Approx(2.0));
  CHECK(f_value(g, 1, IndexSet{}).value == 0.0);
  const GramMatrix eye(Matrix::Identity(6, 6));
  for (std::size_t k = 1; k <= 6; ++k) CHECK(f_value(eye, k, IndexSet{0, 2, 3, 5}).value == Catch::Approx(1.0));
  CHECK_THROWS_AS(f_value(g, 0, all), ParameterError);
  CHECK_THROWS_AS(f_value(g, 1, IndexSet{2}), ParameterError);
}

TEST_CASE("f over all of [N] is lambda_max of A^T A") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = random_rows(s, 7, 1 + static_cast<Eigen::Index>(s % 5));
    IndexSet all(7);
    for (std::size_t i = 0; i < 7; ++i) all[i] = i;
    const Matrix ata = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(ata);
    CHECK(f_value(gram(a), 7, all).value == Catch::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-9));
  }
}

TEST_CASE("f falls back to a sampled lower bound above the envelope") {
  const auto a = random_rows(3, 40, 5);
  const auto g = gram(a);
  IndexSet all(40);
  for (std::size_t i = 0; i < 40; ++i) all[i] = i;
  const auto sampled = f_value(g, 10, all, {200, 1});
  CHECK_FALSE(sampled.exact);
  CHECK(sampled.value <= f_value(g, 40, all).value + 1e-9);
  double diag = 0.0;
  for (Eigen::Index i = 0; i < 40; ++i) diag = std::max(diag, g(i, i));
  CHECK(sampled.value > 0.0);
  CHECK(f_value(g, 1, all).value == Catch::Approx(diag));
}

TEST_CASE("g on exact cases") {
  const auto g = twin_gram();
  CHECK(g_value(g, 1, IndexSet{0, 1}, IndexSet{0}) == Catch::Approx(1.0));
  CHECK(g_value(g, 1, IndexSet{0, 1}, IndexSet{1}) == Catch::Approx(1.0));
  CHECK(g_value(g, 1, IndexSet{0, 1}, IndexSet{}) == 0.0);
  CHECK(g_value(g, 1, IndexSet{0}, IndexSet{0}) == 0.0);
  const GramMatrix eye(Matrix::Identity(5, 5));
  CHECK(g_value(eye, 2, IndexSet{0, 1, 2, 3, 4}, IndexSet{0, 1}) == 0.0);
  const auto big = gram(random_rows(1, 40, 3));
  IndexSet all(40), half(20);
  for (std::size_t i = 0; i < 40; ++i) all[i] = i;
  for (std::size_t i = 0; i < 20; ++i) half[i] = i;
  CHECK_THROWS_AS(g_value(big, 10, all, half), ParameterError);
}

TEST_CASE("g properties: symmetry, g(k) <= f(2k)") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    const auto g = gram(random_rows(100 + s, 8, 3));
    Engine eng = make_engine(s);
    const IndexSet C = random_subset(eng, 8, 0.8);
    const IndexSet I = random_subset(eng, 8, 0.5);
    IndexSet Ic;
    for (std::size_t i = 0; i < 8; ++i) {
      if (!std::binary_search(I.begin(), I.end(), i)) Ic.push_back(i);
    }
    for (std::size_t k = 1; k <= 3; ++k) {
      const double gk = g_value(g, k, C, I);
      CHECK(gk == Catch::Approx(g_value(g, k, C, Ic)).epsilon(1e-12).margin(1e-12));
      CHECK(gk <= f_value(g, 2 * k, C).value + 1e-9);
      CHECK(g_value(g, k, C, I) <= g_value(g, k + 1, C, I) + 1e-12);
    }
  }
}

TEST_CASE("sampled bilinear forms never exceed g") {
  const auto g = gram(random_rows(42, 8, 4));
  const IndexSet all{0, 1, 2, 3, 4, 5, 6, 7};
  const IndexSet I{0, 1, 2, 3};
  const double exact = g_value(g, 2, all, I);
  Engine eng = make_engine(5);
  std::normal_distribution<double> normal;
  double sampled = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const auto x = random_sparse_unit(eng, 4, 2);
    const auto y = random_sparse_unit(eng, 4, 2);
    double v = 0.0;
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        v += x.coeffs[static_cast<Eigen::Index>(a)] * y.coeffs[static_cast<Eigen::Index>(b)] *
             g(static_cast<Eigen::Index>(x.support[a]), static_cast<Eigen::Index>(4 + y.support[b]));
      }
    }
    sampled = std::max(sampled, std::abs(v));
  }
  CHECK(sampled <= exact + 1e-12);
  CHECK(sampled >= 0.9 * exact);
}

TEST_CASE("w_values is G v") {
  const auto a = random_rows(9, 6, 3);
  const auto g = gram(a);
  Vector v(6);
  v << 1, -2, 0.5, 0, 3, -1;
  const Vector w = w_values(g, v);
  const Vector direct = a * (a.transpose() * v);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(w[i] == Catch::Approx(direct[i]));
  CHECK_THROWS_AS(w_values(g, Vector::Ones(5)), ParameterError);
}

TEST_CASE("raw recurrence on the twin example") {
  const auto chk = check_raw_recurrent(twin_gram(), 1, IndexSet{0, 1}, IndexSet{0});
  CHECK(chk.slack.lhs == Catch::Approx(1.0));
  CHECK(chk.slack.rhs == Catch::Approx(3.0));
  CHECK(chk.slack.slack == Catch::Approx(2.0));
  CHECK(chk.slack.pass());
  QuadFormContext bad{twin_gram(), {0, 1}, {0}, 1, 2};
  CHECK_THROWS_AS(check_raw_recurrent(bad), ParameterError);
  QuadFormContext big_k{twin_gram(), {0, 1}, {0}, 3, 1};
  CHECK_THROWS_AS(check_raw_recurrent(big_k), ParameterError);
}

TEST_CASE("quadratic-net inequality") {
  const auto id = net_quadform_check(Matrix::Identity(3, 3), 0.25, 10000, 1);
  CHECK(id.pass);
  CHECK(id.net_sup == Catch::Approx(1.0));
  CHECK(id.net_bound == Catch::Approx(2.0));
  const auto zero = net_quadform_check(Matrix::Zero(4, 4), 0.25, 1000, 1);
  CHECK(zero.pass);
  CHECK(zero.net_bound == 0.0);
  Engine eng = make_engine(77);
  std::normal_distribution<double> normal;
  Matrix m(5, 5);
  for (Eigen::Index i = 0; i < 25; ++i) m.data()[i] = normal(eng);
  const Matrix sym = 0.5 * (m + m.transpose());
  const auto r = net_quadform_check(sym, 0.2, 20000, 2);
  CHECK(r.pass);
  CHECK(r.probe_sup <= r.exact_sup + 1e-12);
  CHECK(r.net_sup <= r.exact_sup + 1e-12);
  CHECK_THROWS_AS(net_quadform_check(Matrix::Identity(9, 9), 0.2, 1, 1), ParameterError);
  CHECK_THROWS_AS(net_quadform_check(Matrix::Identity(2, 2), 0.5, 1, 1), ParameterError);
}

TEST_CASE("net passing on degenerate and identity T") {
  const auto net = build_sparse_net(4, 2, 0.5);
  const auto zero = check_net_passing(Matrix::Zero(4, 4), 2, 2, 0.5, net, 2000, 1);
  CHECK(zero.slack.lhs == 0.0);
  CHECK(zero.slack.rhs == 0.0);
  CHECK(zero.slack.pass());
  const auto eye = check_net_passing(Matrix::Identity(4, 4), 2, 2, 0.5, net, 5000, 1);
  CHECK(eye.E == Catch::Approx(1.0));
  CHECK(eye.net_term == Catch::Approx(1.0));
  CHECK(eye.slack.lhs <= 1.0 / std::sqrt(2.0) + 1e-12);
  CHECK(eye.slack.pass());
  CHECK(eye.probes_checked == 5000 + static_cast<std::size_t>(net.cardinality()));
  CHECK_THROWS_AS(check_net_passing(Matrix::Identity(4, 4), 2, 1, 0.5, net), ParameterError);
  CHECK_THROWS_AS(check_net_passing(Matrix::Identity(4, 4), 1, 2, 0.5, net), ParameterError);
}

TEST_CASE("reduced corpora pass") {
  QuadSuiteConfig cfg;
  cfg.seed = 12;
  cfg.instances = 30;
  CHECK(run_identity_corpus(cfg).pass);
  CHECK(run_quadform_properties(cfg).pass);
  CHECK(run_recursion_suite(cfg).pass);
  cfg.instances = 10;
  CHECK(run_net_passing_corpus(cfg, 2000).pass);
  const auto rec = run_recursion_suite(cfg);
  CHECK(rec.rows.size() == 10);
  CHECK(rec.csv().rfind(std::string(kSlackHeader) + "\n", 0) == 0);
}
