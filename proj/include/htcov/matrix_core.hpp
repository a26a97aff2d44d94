#pragma once

// Gram and covariance computations and the deviation measurement used by
// every experiment.

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <optional>
#include <string>

#include "htcov/distributions.hpp"
#include "htcov/errors.hpp"
#include "htcov/io.hpp"
#include "htcov/spectral.hpp"

namespace htcov {

/// G(i,j) = <X_i, X_j>. Built from the lower triangle and mirrored, so
/// symmetry is exact.
class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(Matrix entries) : g_(std::move(entries)) {
    if (g_.rows() != g_.cols()) throw ContractError("Gram matrix must be square");
  }

  Eigen::Index size() const { return g_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return g_(i, j); }
  const Matrix& entries() const { return g_; }
  /// ||X_i||.
  double norm(Eigen::Index i) const { return std::sqrt(std::max(0.0, g_(i, i))); }

 private:
  Matrix g_;
};

template <typename Derived>
GramMatrix gram(const Eigen::MatrixBase<Derived>& rows) {
  Matrix g = Matrix::Zero(rows.rows(), rows.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(rows.derived());
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return GramMatrix(std::move(g));
}

inline GramMatrix gram(const SampleMatrix& a) { return gram(a.rows); }

/// (1/N) A^T A.
inline Matrix sample_covariance(const SampleMatrix& a) {
  const auto n = a.n();
  Matrix s = Matrix::Zero(n, n);
  s.selfadjointView<Eigen::Lower>().rankUpdate(a.rows.transpose());
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s / static_cast<double>(a.N());
}

struct DeviationReport {
  Eigen::Index n = 0;
  Eigen::Index N = 0;
  std::uint64_t seed = 0;
  /// ||Sigma_N - Sigma|| / ||Sigma||.
  double deviation = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  /// max_i <X_i, Sigma^{-1} X_i>; max_i ||X_i||^2 when Sigma = I.
  double max_norm_sq = 0.0;

  static std::string csv_header() { return "n,N,seed,deviation,s_min,s_max,max_norm_sq"; }
  std::string csv_row() const {
    return csv_join({std::to_string(n), std::to_string(N), std::to_string(seed), fmt_double(deviation),
                     fmt_double(s_min), fmt_double(s_max), fmt_double(max_norm_sq)});
  }
};

inline void to_json(nlohmann::json& j, const DeviationReport& r) {
  j = {{"n", r.n},           {"N", r.N},         {"seed", r.seed},
       {"deviation", r.deviation}, {"s_min", r.s_min}, {"s_max", r.s_max},
       {"max_norm_sq", r.max_norm_sq}};
}

/// Relative deviation of the sample covariance from Sigma (identity when
/// absent), extreme singular values of A, and the precision-weighted max norm.
inline DeviationReport deviation_report(const SampleMatrix& a, const std::optional<Matrix>& sigma = std::nullopt,
                                        const SpectralOptions& opts = {}) {
  const Eigen::Index n = a.n();
  const Matrix cov = sample_covariance(a);
  DeviationReport r;
  r.n = n;
  r.N = a.N();
  r.seed = a.seed;

  const auto ext = symmetric_extremes(cov * static_cast<double>(a.N()), opts, /*psd=*/true);
  r.s_min = std::sqrt(std::max(0.0, ext.min));
  r.s_max = std::sqrt(std::max(0.0, ext.max));

  if (!sigma) {
    r.deviation = spectral_norm_sym(cov - Matrix::Identity(n, n), opts);
    r.max_norm_sq = a.rows.rowwise().squaredNorm().maxCoeff();
    return r;
  }

  const Matrix& s = *sigma;
  if (s.rows() != n || s.cols() != n) throw ParameterError("Sigma dimension does not match the sample");
  if ((s - s.transpose()).norm() > 1e-9 * s.norm()) throw ParameterError("Sigma is not symmetric");
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw ParameterError("Sigma is not positive definite");
  r.deviation = spectral_norm_sym(cov - s, opts) / spectral_norm_sym(s, opts);
  const Matrix whitened = llt.matrixL().solve(a.rows.transpose());
  r.max_norm_sq = whitened.colwise().squaredNorm().maxCoeff();
  return r;
}

/// Rows X_i replaced by sigma_half * X_i.
inline SampleMatrix apply_covariance(const SampleMatrix& a, const Matrix& sigma_half,
                                     std::string description = "sigma_half") {
  if (sigma_half.rows() != a.n() || sigma_half.cols() != a.n()) {
    throw ParameterError("Sigma_half must be n x n");
  }
  SampleMatrix out{a.rows * sigma_half.transpose(), a.spec, a.seed, {}};
  out.transform = a.transform.empty() ? std::move(description) : a.transform + ";" + description;
  return out;
}

/// Symmetric square root of an SPD matrix.
inline Matrix spd_sqrt(const Matrix& s) {
  if (s.rows() != s.cols() || (s - s.transpose()).norm() > 1e-9 * s.norm()) {
    throw ParameterError("Sigma must be square and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw ParameterError("Sigma is not positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace htcov
