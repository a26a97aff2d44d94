#include <catch_amalgamated.hpp>

#include <cmath>

#include "htcov/sparsify.hpp"

using namespace htcov;

namespace {

Vector unit(Eigen::Index k, Eigen::Index at) {
  Vector y = Vector::Zero(k);
  y[at] = 1.0;
  return y;
}

}  // namespace

TEST_CASE("all-ones T with a basis vector lands in the big-coordinate case") {
  const Matrix t = Matrix::Ones(4, 12);
  const auto cert = sparsify(t, unit(12, 0), {1.0, 1.0, 64, 3});
  CHECK(cert.kind == SparsifyCase::big_coordinate_projection);
  CHECK(cert.projection_support == std::vector<std::size_t>{0});
  CHECK_FALSE(cert.trivial);
  const auto chk = verify_certificate(t, unit(12, 0), 1.0, 1.0, cert, 1e4);
  CHECK(chk.pass());
  // delta^2 min|Ty| / (max|t| / sqrt(k) + kmax_1 |TPy|) = 1 / (1/sqrt(12) + 1)
  CHECK(chk.measured_ratio == Catch::Approx(1.0 / (1.0 / std::sqrt(12.0) + 1.0)));
}

TEST_CASE("parameter validation") {
  const Matrix t = Matrix::Ones(4, 11);
  CHECK_THROWS_AS(sparsify(t, unit(11, 0), {1.0, 1.0, 64, 3}), ParameterError);
  const Matrix t12 = Matrix::Ones(4, 12);
  CHECK_THROWS_AS(sparsify(t12, unit(12, 0), {0.0, 1.0, 64, 3}), ParameterError);
  CHECK_THROWS_AS(sparsify(Matrix::Ones(3, 12), unit(12, 0), {1.0, 1.0, 64, 3}), ParameterError);
  CHECK_THROWS_AS(sparsify(t12, 2.0 * unit(12, 0), {1.0, 1.0, 64, 3}), ParameterError);
  CHECK_THROWS_AS(sparsify(t12, unit(11, 0), {1.0, 1.0, 64, 3}), ParameterError);
  CHECK_THROWS_AS(sparsify(t12, unit(12, 0), {1.0, 1.0, 0, 3}), ParameterError);
}

TEST_CASE("a zero row of Ty gives a trivial certificate") {
  Matrix t = Matrix::Ones(4, 12);
  t.row(2).setZero();
  const auto cert = sparsify(t, unit(12, 5), {1.0, 1.0, 8, 0});
  CHECK(cert.trivial);
  CHECK(cert.measured_ratio == 0.0);
  CHECK(verify_certificate(t, unit(12, 5), 1.0, 1.0, cert, 1.0).pass());
}

TEST_CASE("hand-built certificates with broken invariants are rejected") {
  const auto inst = make_sparsify_instance(5, 0);
  SparsifyCertificate full;
  full.kind = SparsifyCase::randomized_projection;
  for (Eigen::Index j = 0; j < inst.t.cols(); ++j) full.projection_support.push_back(static_cast<std::size_t>(j));
  const auto chk = verify_certificate(inst.t, inst.y, 0.5, 8.0, full, 1e4);
  CHECK_FALSE(chk.rank_ok);
  CHECK_FALSE(chk.pass());

  SparsifyCertificate no_witness;
  no_witness.kind = SparsifyCase::max_entry_domination;
  CHECK_FALSE(verify_certificate(inst.t, inst.y, 0.5, 8.0, no_witness, 1e4).case_ok);

  SparsifyCertificate wrong_support;
  wrong_support.kind = SparsifyCase::big_coordinate_projection;
  wrong_support.projection_support = {static_cast<std::size_t>(inst.t.cols())};
  CHECK_FALSE(verify_certificate(inst.t, inst.y, 0.5, 8.0, wrong_support, 1e4).case_ok);
}

TEST_CASE("sparsify is deterministic and certificates verify on a small corpus") {
  std::size_t failures = 0;
  std::size_t cases[3] = {0, 0, 0};
  for (std::size_t id = 0; id < 120; ++id) {
    const auto inst = make_sparsify_instance(21, id);
    const SparsifyOptions opt{inst.delta, 8.0, 64, derive_seed(21, {id})};
    SparsifyCertificate a, b;
    try {
      a = sparsify(inst.t, inst.y, opt);
      b = sparsify(inst.t, inst.y, opt);
    } catch (const SparsifySearchFailure& f) {
      ++failures;
      CHECK(f.best().draws_used == 64);
      continue;
    }
    CHECK(a == b);
    ++cases[static_cast<int>(a.kind)];
    const auto chk = verify_certificate(inst.t, inst.y, inst.delta, 8.0, a, 1e4);
    INFO("instance " << id << " family " << inst.family);
    CHECK(chk.rank_ok);
    CHECK(chk.case_ok);
    CHECK(chk.measured_ratio == Catch::Approx(a.measured_ratio));
  }
  CHECK(failures <= 6);
  CHECK(cases[0] + cases[1] + cases[2] + failures == 120);
}

TEST_CASE("corpus runner agrees across worker counts") {
  SparsifySuiteConfig cfg;
  cfg.instances = 60;
  cfg.seed = 9;
  SparsifyCorpusStats st1, st3;
  const auto r1 = run_sparsify_suite(cfg, &st1);
  cfg.workers = 3;
  const auto r3 = run_sparsify_suite(cfg, &st3);
  CHECK(r1.csv() == r3.csv());
  CHECK(st1.instances == 60);
  CHECK(st1.rank_violations == 0);
  CHECK(st1.survivor_violations == 0);
}

TEST_CASE("small C_K reaches the randomized projection case") {
  // At C_K = 8 a single entry almost always dominates; a small C_K removes that shortcut.
  std::size_t randomized = 0, failures = 0;
  for (std::size_t id = 0; id < 150; ++id) {
    const auto inst = make_sparsify_instance(33, id);
    const SparsifyOptions opt{inst.delta, 0.02, 64, derive_seed(33, {id})};
    try {
      const auto cert = sparsify(inst.t, inst.y, opt);
      if (cert.kind != SparsifyCase::randomized_projection) continue;
      ++randomized;
      INFO("instance " << id << " family " << inst.family);
      const auto chk = verify_certificate(inst.t, inst.y, inst.delta, 0.02, cert, 1e4);
      CHECK(chk.rank_ok);
      CHECK(chk.case_ok);
      CHECK(cert.survivors.size() >= static_cast<std::size_t>(inst.t.rows() / 4));
      CHECK(cert.draws_used >= 1);
    } catch (const SparsifySearchFailure& f) {
      ++failures;
      CHECK(verify_certificate(inst.t, inst.y, inst.delta, 0.02, f.best(), 1e4).rank_ok);
    }
  }
  CHECK(randomized >= 10);
}
