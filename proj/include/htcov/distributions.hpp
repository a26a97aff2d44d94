#pragma once

// Samplers for centered isotropic heavy-tailed distributions and their
// projection-moment profiles.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "htcov/errors.hpp"
#include "htcov/rng.hpp"
#include "htcov/spectral.hpp"

namespace htcov {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Family {
  gaussian,
  iid_symmetric_pareto,
  iid_student_t,
  spherical_pareto_radius,
  coordinate_discrete,
};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::iid_symmetric_pareto: return "iid-symmetric-pareto";
    case Family::iid_student_t: return "iid-student-t";
    case Family::spherical_pareto_radius: return "spherical-pareto-radius";
    case Family::coordinate_discrete: return "coordinate-discrete";
  }
  return "unknown";
}

inline Family parse_family(std::string_view s) {
  for (Family f : {Family::gaussian, Family::iid_symmetric_pareto, Family::iid_student_t,
                   Family::spherical_pareto_radius, Family::coordinate_discrete}) {
    if (family_name(f) == s) return f;
  }
  throw ParameterError("unknown distribution family '" + std::string(s) + "'");
}

/// A distribution family in dimension n, normalized to identity covariance.
/// `alpha`/`t0` parameterize the Pareto families, `nu` the Student-t family.
struct DistributionSpec {
  Family family = Family::gaussian;
  std::size_t n = 1;
  double alpha = 0.0;
  double t0 = 1.0;
  double nu = 0.0;

  static DistributionSpec gaussian(std::size_t n) { return {Family::gaussian, n}; }
  static DistributionSpec pareto(std::size_t n, double alpha, double t0 = 1.0) {
    return {Family::iid_symmetric_pareto, n, alpha, t0};
  }
  static DistributionSpec student_t(std::size_t n, double nu) { return {Family::iid_student_t, n, 0.0, 1.0, nu}; }
  static DistributionSpec spherical_pareto(std::size_t n, double alpha) {
    return {Family::spherical_pareto_radius, n, alpha};
  }
  static DistributionSpec coordinate_discrete(std::size_t n) { return {Family::coordinate_discrete, n}; }

  DistributionSpec with_dimension(std::size_t dim) const {
    DistributionSpec s = *this;
    s.n = dim;
    return s;
  }

  /// Supremum of the moment orders p with finite E|<X,a>|^p.
  double max_moment_order() const {
    switch (family) {
      case Family::iid_symmetric_pareto:
      case Family::spherical_pareto_radius: return alpha;
      case Family::iid_student_t: return nu;
      default: return std::numeric_limits<double>::infinity();
    }
  }

  void validate() const {
    if (n < 1) throw ParameterError("dimension n must be >= 1");
    switch (family) {
      case Family::iid_symmetric_pareto:
        if (!(t0 > 0.0)) throw ParameterError("pareto cutoff t0 must be positive");
        [[fallthrough]];
      case Family::spherical_pareto_radius:
        if (!(alpha > 2.0)) throw ParameterError("pareto tail index must exceed 2");
        break;
      case Family::iid_student_t:
        if (!(nu > 2.0)) throw ParameterError("student-t degrees of freedom must exceed 2");
        break;
      default: break;
    }
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

inline void to_json(nlohmann::json& j, const DistributionSpec& s) {
  nlohmann::json params = nlohmann::json::object();
  switch (s.family) {
    case Family::iid_symmetric_pareto: params = {{"alpha", s.alpha}, {"t0", s.t0}}; break;
    case Family::spherical_pareto_radius: params = {{"alpha", s.alpha}}; break;
    case Family::iid_student_t: params = {{"nu", s.nu}}; break;
    default: break;
  }
  j = {{"family", std::string(family_name(s.family))}, {"params", params}, {"n", s.n}};
}

inline void from_json(const nlohmann::json& j, DistributionSpec& s) {
  try {
    s = DistributionSpec{};
    s.family = parse_family(j.at("family").get<std::string>());
    const auto n = j.at("n").get<long long>();
    if (n < 1) throw ParameterError("dimension n must be >= 1");
    s.n = static_cast<std::size_t>(n);
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    s.alpha = params.value("alpha", 0.0);
    s.t0 = params.value("t0", 1.0);
    s.nu = params.value("nu", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed distribution spec: ") + e.what());
  }
  s.validate();
}

/// N x n matrix whose rows are i.i.d. draws, plus provenance.
struct SampleMatrix {
  RowMatrix rows;
  DistributionSpec spec;
  std::uint64_t seed = 0;
  /// Empty for raw draws; describes a linear map applied afterwards.
  std::string transform;

  Eigen::Index N() const { return rows.rows(); }
  Eigen::Index n() const { return rows.cols(); }
};

namespace detail {

inline double pareto_second_moment(double alpha, double t0) { return alpha * t0 * t0 / (alpha - 2.0); }

}  // namespace detail

/// Streams i.i.d. rows for one spec from one seed. sample_matrix and the
/// streaming estimators share it, so a seed always maps to the same rows.
class RowSampler {
 public:
  RowSampler(const DistributionSpec& spec, std::uint64_t seed) : spec_(spec), eng_(make_engine(seed)) {
    spec_.validate();
    switch (spec_.family) {
      case Family::iid_symmetric_pareto:
        scale_ = 1.0 / std::sqrt(detail::pareto_second_moment(spec_.alpha, spec_.t0));
        break;
      case Family::iid_student_t:
        student_ = std::student_t_distribution<double>(spec_.nu);
        scale_ = std::sqrt((spec_.nu - 2.0) / spec_.nu);
        break;
      case Family::spherical_pareto_radius:
        scale_ = std::sqrt(static_cast<double>(spec_.n) / detail::pareto_second_moment(spec_.alpha, 1.0));
        break;
      case Family::coordinate_discrete:
        scale_ = std::sqrt(static_cast<double>(spec_.n));
        break;
      case Family::gaussian: break;
    }
  }

  std::size_t dimension() const { return spec_.n; }

  template <typename Row>
  void fill(Row&& row) {
    const auto n = static_cast<Eigen::Index>(spec_.n);
    switch (spec_.family) {
      case Family::gaussian:
        for (Eigen::Index j = 0; j < n; ++j) row[j] = normal_(eng_);
        break;
      case Family::iid_symmetric_pareto: {
        const double inv_alpha = 1.0 / spec_.alpha;
        for (Eigen::Index j = 0; j < n; ++j) {
          const double sign = random_sign(eng_);
          row[j] = sign * scale_ * spec_.t0 * std::pow(uniform_open0(eng_), -inv_alpha);
        }
        break;
      }
      case Family::iid_student_t:
        for (Eigen::Index j = 0; j < n; ++j) row[j] = scale_ * student_(eng_);
        break;
      case Family::spherical_pareto_radius: {
        double norm2 = 0.0;
        do {
          norm2 = 0.0;
          for (Eigen::Index j = 0; j < n; ++j) {
            row[j] = normal_(eng_);
            norm2 += row[j] * row[j];
          }
        } while (norm2 == 0.0);
        const double radius = scale_ * std::pow(uniform_open0(eng_), -1.0 / spec_.alpha);
        const double f = radius / std::sqrt(norm2);
        for (Eigen::Index j = 0; j < n; ++j) row[j] *= f;
        break;
      }
      case Family::coordinate_discrete: {
        for (Eigen::Index j = 0; j < n; ++j) row[j] = 0.0;
        const double sign = random_sign(eng_);
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        row[pick(eng_)] = sign * scale_;
        break;
      }
    }
  }

 private:
  DistributionSpec spec_;
  Engine eng_;
  std::normal_distribution<double> normal_;
  std::student_t_distribution<double> student_{3.0};
  double scale_ = 1.0;
};

/// N i.i.d. rows from spec in dimension n. Deterministic in (spec, n, N, seed).
inline SampleMatrix sample_matrix(const DistributionSpec& spec, std::size_t n, std::size_t N, std::uint64_t seed) {
  if (n < 1) throw ParameterError("dimension n must be >= 1");
  if (N < 1) throw ParameterError("sample size N must be >= 1");
  const DistributionSpec s = spec.with_dimension(n);
  RowSampler sampler(s, seed);
  SampleMatrix out{RowMatrix(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(n)), s, seed, {}};
  for (Eigen::Index i = 0; i < out.rows.rows(); ++i) sampler.fill(out.rows.row(i));
  return out;
}

inline SampleMatrix sample_matrix(const DistributionSpec& spec, std::size_t N, std::uint64_t seed) {
  return sample_matrix(spec, spec.n, N, seed);
}

// ---------------------------------------------------------------------------
// Moment profiles

enum class MomentProvenance { analytic, monte_carlo_estimate };

inline std::string_view provenance_name(MomentProvenance p) {
  return p == MomentProvenance::analytic ? "analytic" : "monte-carlo-estimate";
}

/// (p, B) with sup_{a in S^{n-1}} E|<X,a>|^p <= B.
struct MomentProfile {
  double p = 0.0;
  double B = 1.0;
  MomentProvenance provenance = MomentProvenance::analytic;
};

struct MomentSweepOptions {
  std::size_t random_directions = 1000;
  std::size_t samples = 100000;
  double safety_factor = 1.2;
  std::uint64_t seed = 0x6d6f6d656e74ULL;
};

/// E|g|^p for a standard normal g.
inline double gaussian_abs_moment(double p) {
  return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

/// E|xi|^p of one normalized coordinate of an i.i.d.-coordinate family
/// (the value of E|<X,e_1>|^p).
inline double coordinate_abs_moment(const DistributionSpec& spec, double p) {
  spec.validate();
  if (p >= spec.max_moment_order()) throw InfiniteMomentError("moment order p is not below the tail index");
  switch (spec.family) {
    case Family::gaussian: return gaussian_abs_moment(p);
    case Family::iid_symmetric_pareto: {
      const double raw = spec.alpha * std::pow(spec.t0, p) / (spec.alpha - p);
      return raw / std::pow(detail::pareto_second_moment(spec.alpha, spec.t0), p / 2.0);
    }
    case Family::iid_student_t: {
      const double nu = spec.nu;
      const double raw = std::pow(nu, p / 2.0) * std::tgamma((p + 1.0) / 2.0) * std::tgamma((nu - p) / 2.0) /
                         (std::sqrt(std::numbers::pi) * std::tgamma(nu / 2.0));
      return raw * std::pow((nu - 2.0) / nu, p / 2.0);
    }
    case Family::coordinate_discrete: return std::pow(static_cast<double>(spec.n), p / 2.0 - 1.0);
    case Family::spherical_pareto_radius: break;
  }
  throw ParameterError("coordinate moment is not defined for the spherical family");
}

/// Projection moment bound B for order p. Closed form for gaussian and
/// coordinate-discrete; otherwise the max empirical p-th moment over random
/// directions, the basis vectors and +-(1,...,1)/sqrt(n), times a safety factor.
inline MomentProfile moment_bound(const DistributionSpec& spec, double p, const MomentSweepOptions& opts = {}) {
  spec.validate();
  if (!(p > 2.0)) throw ParameterError("moment order p must exceed 2");
  if (p >= spec.max_moment_order()) throw InfiniteMomentError("moment order p is not below the tail index");

  if (spec.family == Family::gaussian) return {p, gaussian_abs_moment(p), MomentProvenance::analytic};
  if (spec.family == Family::coordinate_discrete) {
    return {p, std::pow(static_cast<double>(spec.n), p / 2.0 - 1.0), MomentProvenance::analytic};
  }

  const auto n = static_cast<Eigen::Index>(spec.n);
  const SampleMatrix draws = sample_matrix(spec, spec.n, opts.samples, derive_seed(opts.seed, {0}));

  Matrix directions(n, static_cast<Eigen::Index>(opts.random_directions) + n + 1);
  directions.leftCols(n).setIdentity();
  directions.col(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Engine eng = make_engine(derive_seed(opts.seed, {1}));
  std::normal_distribution<double> normal;
  for (Eigen::Index c = n + 1; c < directions.cols(); ++c) {
    for (Eigen::Index r = 0; r < n; ++r) directions(r, c) = normal(eng);
    directions.col(c).normalize();
  }

  constexpr Eigen::Index kBlock = 32;
  double best = 0.0;
  for (Eigen::Index c0 = 0; c0 < directions.cols(); c0 += kBlock) {
    const Eigen::Index width = std::min(kBlock, directions.cols() - c0);
    const Matrix proj = draws.rows * directions.middleCols(c0, width);
    for (Eigen::Index c = 0; c < width; ++c) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < proj.rows(); ++i) acc += std::pow(std::abs(proj(i, c)), p);
      best = std::max(best, acc / static_cast<double>(proj.rows()));
    }
  }
  return {p, std::max(1.0, opts.safety_factor * best), MomentProvenance::monte_carlo_estimate};
}

/// ||(1/M) sum X_i X_i^T - I||_{2->2} over M fresh draws.
inline double isotropy_check(const DistributionSpec& spec, std::size_t n, std::size_t M, std::uint64_t seed) {
  if (M < n) throw ParameterError("isotropy_check needs M >= n");
  const DistributionSpec s = spec.with_dimension(n);
  RowSampler sampler(s, seed);
  const auto dim = static_cast<Eigen::Index>(n);
  constexpr Eigen::Index kChunk = 4096;
  RowMatrix block(kChunk, dim);
  Matrix acc = Matrix::Zero(dim, dim);
  std::size_t remaining = M;
  while (remaining > 0) {
    const auto rows = static_cast<Eigen::Index>(std::min<std::size_t>(remaining, kChunk));
    for (Eigen::Index i = 0; i < rows; ++i) sampler.fill(block.row(i));
    acc.selfadjointView<Eigen::Lower>().rankUpdate(block.topRows(rows).transpose());
    remaining -= static_cast<std::size_t>(rows);
  }
  acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
  acc /= static_cast<double>(M);
  acc -= Matrix::Identity(dim, dim);
  return spectral_norm_sym(acc);
}

}  // namespace htcov
