#include <catch_amalgamated.hpp>

#include <random>

#include "htcov/errors.hpp"
#include "htcov/rng.hpp"
#include "htcov/spectral.hpp"

using namespace htcov;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(eng);
  }
  return m;
}

SpectralOptions forced_power() {
  SpectralOptions o;
  o.dense_cutoff = 0;
  o.max_iterations = 200000;
  return o;
}

}  // namespace

TEST_CASE("spectral_norm_sym on small exact cases") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -4;
  CHECK(spectral_norm_sym(d) == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(spectral_norm_sym(d, forced_power()) == Catch::Approx(4.0).epsilon(1e-8));
  CHECK(spectral_norm_sym(Matrix::Identity(8, 8)) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm_sym(Matrix::Identity(8, 8), forced_power()) == Catch::Approx(1.0).epsilon(1e-8));
  CHECK(spectral_norm_sym(Matrix::Zero(5, 5), forced_power()) == 0.0);
}

TEST_CASE("power iteration path matches the dense eigensolver on 30x30") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Matrix g = random_matrix(30, 30, seed);
    const Matrix sym = 0.5 * (g + g.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const double oracle = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(spectral_norm_sym(sym, forced_power()) == Catch::Approx(oracle).epsilon(1e-8));

    const Matrix psd = g.transpose() * g;
    Eigen::SelfAdjointEigenSolver<Matrix> ps(psd);
    const auto ext = symmetric_extremes(psd, forced_power(), true);
    CHECK_FALSE(ext.dense);
    CHECK(ext.max == Catch::Approx(ps.eigenvalues().maxCoeff()).epsilon(1e-8));
    CHECK(ext.min == Catch::Approx(ps.eigenvalues().minCoeff()).margin(1e-8 * ext.max));
  }
}

TEST_CASE("spectral norm is homogeneous") {
  const Matrix g = random_matrix(12, 12, 9);
  const Matrix sym = g + g.transpose();
  for (double c : {-3.0, 0.5, 7.0}) {
    CHECK(spectral_norm_sym(c * sym) == Catch::Approx(std::abs(c) * spectral_norm_sym(sym)).epsilon(1e-10));
  }
}

TEST_CASE("extreme_singular_values on exact cases") {
  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = 3;
  a(1, 1) = 4;
  auto sv = extreme_singular_values(a);
  CHECK(sv.s_min == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(sv.s_max == Catch::Approx(4.0).epsilon(1e-12));

  Matrix pad = Matrix::Zero(7, 4);
  pad.topRows(4).setIdentity();
  sv = extreme_singular_values(pad, forced_power());
  CHECK(sv.s_min == Catch::Approx(1.0).epsilon(1e-8));
  CHECK(sv.s_max == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("extreme_singular_values matches a dense SVD oracle on 40x10") {
  const Matrix a = random_matrix(40, 10, 17);
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  for (const auto& opts : {SpectralOptions{}, forced_power()}) {
    const auto sv = extreme_singular_values(a, opts);
    CHECK(sv.s_max == Catch::Approx(s.maxCoeff()).epsilon(1e-8));
    CHECK(sv.s_min == Catch::Approx(s.minCoeff()).epsilon(1e-8));
  }
}

TEST_CASE("spectral routines reject bad input") {
  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(spectral_norm_sym(asym), ContractError);
  CHECK_THROWS_AS(extreme_singular_values(Matrix::Zero(2, 3)), ParameterError);
  SpectralOptions bad;
  bad.tol = 0.0;
  bad.dense_cutoff = 0;
  CHECK_THROWS_AS(spectral_norm_sym(Matrix::Identity(3, 3), bad), ParameterError);
}

TEST_CASE("iteration cap raises ConvergenceError with the best estimate") {
  const Matrix g = random_matrix(20, 20, 4);
  const Matrix psd = g.transpose() * g;
  SpectralOptions o;
  o.dense_cutoff = 0;
  o.max_iterations = 2;
  o.tol = 1e-14;
  try {
    symmetric_extremes(psd, o, true);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.best_estimate() > 0.0);
    CHECK(e.best_estimate() <= detail::dense_extremes(psd).max * (1 + 1e-12));
  }
}

TEST_CASE("top_singular_value agrees with the SVD on square matrices") {
  Engine eng = make_engine(12);
  std::normal_distribution<double> normal;
  for (Eigen::Index n : {10, 100, 128}) {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(eng);
    Eigen::JacobiSVD<Matrix> svd(a);
    CHECK(top_singular_value(a) == Catch::Approx(svd.singularValues()(0)).epsilon(1e-6));
  }
}
