#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "htcov/errors.hpp"
#include "htcov/rng.hpp"

namespace htcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SpectralOptions {
  double tol = 1e-8;
  int max_iterations = 10000;
  /// Matrices of dimension <= dense_cutoff go to the dense eigensolver.
  Eigen::Index dense_cutoff = 64;
};

struct ExtremeEigen {
  double min = 0.0;
  double max = 0.0;
  int iterations = 0;
  bool dense = false;
};

namespace detail {

inline void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) throw ContractError("symmetric routine called with a non-square matrix");
  const double fro = m.norm();
  const double asym = (m - m.transpose()).norm();
  if (asym > 1e-9 * fro) {
    throw ContractError("matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
  }
}

/// Largest row l1-norm; an upper bound on every |eigenvalue|.
inline double gershgorin_radius(const Matrix& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

struct PowerResult {
  double value;
  int iterations;
};

/// Dominant eigenvalue of the PSD operator v -> op(v) by power iteration, stopping
/// on the Rayleigh-quotient residual ||Bv - theta v|| <= tol * scale(theta).
template <typename Op, typename Scale>
PowerResult power_dominant(Eigen::Index dim, Op&& op, Scale&& scale, const SpectralOptions& opts,
                           std::uint64_t start_seed) {
  Engine eng = make_engine(start_seed);
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(eng);
  v.normalize();

  double best = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Vector w = op(v);
    const double theta = v.dot(w);
    best = theta;
    const double wn = w.norm();
    if (wn == 0.0) return {0.0, it};
    const double residual = (w - theta * v).norm();
    if (residual <= opts.tol * scale(theta)) return {theta, it};
    v = w / wn;
  }
  throw ConvergenceError("power iteration did not converge", best, opts.max_iterations);
}

inline ExtremeEigen dense_extremes(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0, 0);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff(), 0, true};
}

}  // namespace detail

/// Smallest and largest eigenvalue of a symmetric matrix.
///
/// Above the dense cutoff, the top eigenvalue comes from power iteration on
/// M + sI (s = 0 when `psd` is set, otherwise the Gershgorin radius), and the
/// bottom one from power iteration on cI - M with c = lambda_max + 1% margin.
inline ExtremeEigen symmetric_extremes(const Matrix& m, const SpectralOptions& opts = {}, bool psd = false) {
  detail::require_symmetric(m);
  const Eigen::Index dim = m.rows();
  if (dim == 0) return {0.0, 0.0, 0, true};
  if (!(opts.tol > 0.0)) throw ParameterError("tol must be positive");
  if (dim <= opts.dense_cutoff) return detail::dense_extremes(m);

  const double radius = detail::gershgorin_radius(m);
  if (radius == 0.0) return {0.0, 0.0, 0, false};
  const double floor = radius * std::numeric_limits<double>::epsilon();

  const double top_shift = psd ? 0.0 : radius;
  auto top = detail::power_dominant(
      dim, [&](const Vector& v) -> Vector { return m * v + top_shift * v; },
      [&](double theta) { return std::max(std::abs(theta - top_shift), floor); }, opts,
      0x51ec7a1ULL + static_cast<std::uint64_t>(dim));
  const double lmax = top.value - top_shift;

  const double c = lmax + 0.01 * std::max(std::abs(lmax), floor);
  auto bottom = detail::power_dominant(
      dim, [&](const Vector& v) -> Vector { return c * v - m * v; },
      [&](double theta) { return std::max({std::abs(c - theta), std::abs(lmax), floor}); }, opts,
      0xb0770dULL + static_cast<std::uint64_t>(dim));
  const double lmin = c - bottom.value;
  return {std::min(lmin, lmax), lmax, top.iterations + bottom.iterations, false};
}

/// Spectral norm max_i |lambda_i(M)| of a symmetric matrix.
inline double spectral_norm_sym(const Matrix& m, const SpectralOptions& opts = {}) {
  const auto ext = symmetric_extremes(m, opts);
  return std::max(std::abs(ext.min), std::abs(ext.max));
}

struct SingularPair {
  double s_min = 0.0;
  double s_max = 0.0;
};

/// Extreme singular values of a tall matrix via the eigenvalues of A^T A.
inline SingularPair extreme_singular_values(const Matrix& a, const SpectralOptions& opts = {}) {
  if (a.rows() < a.cols()) throw ParameterError("extreme_singular_values requires N >= n");
  Matrix gram = Matrix::Zero(a.cols(), a.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const auto ext = symmetric_extremes(gram, opts, /*psd=*/true);
  return {std::sqrt(std::max(0.0, ext.min)), std::sqrt(std::max(0.0, ext.max))};
}

/// s_max alone. Skips the bottom iteration, which converges slowly on
/// near-singular square matrices.
inline double top_singular_value(const Matrix& a, const SpectralOptions& opts = {}) {
  Matrix gram = Matrix::Zero(a.cols(), a.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const Eigen::Index dim = gram.rows();
  if (dim == 0) return 0.0;
  if (dim <= opts.dense_cutoff) return std::sqrt(std::max(0.0, detail::dense_extremes(gram).max));
  const double radius = detail::gershgorin_radius(gram);
  if (radius == 0.0) return 0.0;
  const double floor = radius * std::numeric_limits<double>::epsilon();
  auto top = detail::power_dominant(
      dim, [&](const Vector& v) -> Vector { return gram * v; },
      [&](double theta) { return std::max(std::abs(theta), floor); }, opts, 0x51ec7a1ULL + static_cast<std::uint64_t>(dim));
  return std::sqrt(std::max(0.0, top.value));
}

}  // namespace htcov
