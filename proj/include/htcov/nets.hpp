#pragma once

// Euclidean rho-nets on spheres and support-preserving nets on sparse unit
// vectors, at desk scale.
//
// Candidate points come from a grid on the surface of the cube [-1,1]^d pushed
// radially onto the sphere. Radial projection onto the unit ball is 1-Lipschitz
// outside the ball, so a face grid of spacing g covers the sphere within
// g * sqrt(d-1) / 2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "htcov/errors.hpp"
#include "htcov/rng.hpp"
#include "htcov/spectral.hpp"

namespace htcov {

/// Enumerates the k-subsets of `pool` in lexicographic order.
template <typename Fn>
void for_each_subset(std::span<const std::size_t> pool, std::size_t k, Fn&& fn) {
  if (k > pool.size()) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::size_t> subset(k);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = pool[idx[i]];
    fn(std::span<const std::size_t>(subset));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

namespace detail {

inline std::size_t grid_points_per_axis(double spacing) {
  return static_cast<std::size_t>(std::ceil(2.0 / spacing)) + 1;
}

inline double grid_count(std::size_t dim, double spacing) {
  if (dim == 1) return 2.0;
  return 2.0 * static_cast<double>(dim) * std::pow(static_cast<double>(grid_points_per_axis(spacing)), dim - 1.0);
}

/// Unit vectors (columns) from the cube-face grid with spacing <= `spacing`.
inline Matrix cube_face_grid(std::size_t dim, double spacing) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (dim == 1) {
    Matrix pts(1, 2);
    pts << 1.0, -1.0;
    return pts;
  }
  const std::size_t per_axis = grid_points_per_axis(spacing);
  const double step = 2.0 / static_cast<double>(per_axis - 1);
  const auto count = static_cast<Eigen::Index>(grid_count(dim, spacing));
  Matrix pts(d, count);
  Eigen::Index col = 0;
  std::vector<std::size_t> counter(dim - 1);
  for (Eigen::Index axis = 0; axis < d; ++axis) {
    for (double sign : {1.0, -1.0}) {
      std::fill(counter.begin(), counter.end(), 0);
      for (;;) {
        Eigen::Index c = 0;
        for (Eigen::Index r = 0; r < d; ++r) {
          pts(r, col) = r == axis ? sign : -1.0 + step * static_cast<double>(counter[static_cast<std::size_t>(c++)]);
        }
        pts.col(col).normalize();
        ++col;
        std::size_t pos = 0;
        while (pos < counter.size() && ++counter[pos] == per_axis) counter[pos++] = 0;
        if (pos == counter.size()) break;
      }
    }
  }
  return pts;
}

}  // namespace detail

/// A rho-net of the unit sphere in R^dim, points stored as columns.
struct SphereNet {
  std::size_t dim = 0;
  double rho = 0.0;
  Matrix points;
};

inline constexpr double kMaxNetCandidates = 5e5;

/// Farthest-point thinning of a candidate grid with covering radius rho/4,
/// stopped once every candidate lies within 3 rho / 4 of the net.
inline SphereNet thinned_sphere_net(std::size_t dim, double rho) {
  if (dim < 1 || !(rho > 0.0)) throw ParameterError("sphere net needs dim >= 1 and rho > 0");
  const double eps = rho / 4.0;
  const double spacing = dim == 1 ? 2.0 : 2.0 * eps / std::sqrt(static_cast<double>(dim - 1));
  if (detail::grid_count(dim, spacing) > kMaxNetCandidates) {
    throw ParameterError("sphere net envelope exceeded (dimension too large for this rho)");
  }
  const Matrix cand = detail::cube_face_grid(dim, spacing);
  const double reach = rho - eps;

  std::vector<Eigen::Index> chosen{0};
  Eigen::VectorXd dist2 = (cand.colwise() - cand.col(0)).colwise().squaredNorm().transpose();
  for (;;) {
    Eigen::Index far = 0;
    const double worst = dist2.maxCoeff(&far);
    if (worst <= reach * reach) break;
    chosen.push_back(far);
    dist2 = dist2.cwiseMin((cand.colwise() - cand.col(far)).colwise().squaredNorm().transpose());
  }
  SphereNet net{dim, rho, Matrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(chosen.size()))};
  for (std::size_t i = 0; i < chosen.size(); ++i) net.points.col(static_cast<Eigen::Index>(i)) = cand.col(chosen[i]);
  return net;
}

/// Unthinned grid net: the cube-face grid with covering radius <= rho.
inline SphereNet dense_sphere_net(std::size_t dim, double rho, double max_points = 4e6) {
  if (dim < 1 || !(rho > 0.0)) throw ParameterError("sphere net needs dim >= 1 and rho > 0");
  const double spacing = dim == 1 ? 2.0 : 2.0 * rho / std::sqrt(static_cast<double>(dim - 1));
  if (detail::grid_count(dim, spacing) > max_points) {
    throw ParameterError("dense sphere net envelope exceeded");
  }
  return {dim, rho, detail::cube_face_grid(dim, spacing)};
}

/// Support-preserving rho-net on r-sparse unit vectors of R^N: for every
/// support S with 1 <= |S| <= r, a rho-net of the unit sphere of R^S.
/// Templates are shared between supports of equal size.
struct SparseNet {
  std::size_t ambient = 0;
  std::size_t sparsity = 0;
  double rho = 0.0;
  /// templates[s-1]: net on the unit sphere of R^s.
  std::vector<SphereNet> templates;
  /// Achieved constant C with cardinality = (C N / (rho r))^r.
  double C_net = 0.0;

  double cardinality() const {
    double total = 0.0;
    for (std::size_t s = 1; s <= sparsity; ++s) {
      total += binomial(ambient, s) * static_cast<double>(templates[s - 1].points.cols());
    }
    return total;
  }

  /// fn(support, coefficients) for every net point.
  template <typename Fn>
  void for_each_point(Fn&& fn) const {
    std::vector<std::size_t> all(ambient);
    for (std::size_t i = 0; i < ambient; ++i) all[i] = i;
    for (std::size_t s = 1; s <= sparsity; ++s) {
      const Matrix& tpl = templates[s - 1].points;
      for_each_subset(all, s, [&](std::span<const std::size_t> support) {
        for (Eigen::Index c = 0; c < tpl.cols(); ++c) fn(support, tpl.col(c));
      });
    }
  }

  /// Distance from a unit vector x (given by support and coefficients) to the
  /// nearest net point supported on supp(x).
  double distance_within_support(std::span<const std::size_t> support, const Vector& coeffs) const {
    (void)support;
    const Matrix& tpl = templates.at(static_cast<std::size_t>(coeffs.size()) - 1).points;
    return std::sqrt((tpl.colwise() - coeffs).colwise().squaredNorm().minCoeff());
  }
};

inline SparseNet build_sparse_net(std::size_t N, std::size_t r, double rho) {
  if (N < 1 || N > 12 || r < 1 || r > 4 || r > N) {
    throw ParameterError("sparse net envelope: 1 <= r <= min(N, 4), N <= 12");
  }
  if (!(rho > 0.0 && rho <= 1.0)) throw ParameterError("sparse net needs rho in (0, 1]");
  SparseNet net{N, r, rho, {}, 0.0};
  for (std::size_t s = 1; s <= r; ++s) net.templates.push_back(thinned_sphere_net(s, rho));
  net.C_net = std::pow(net.cardinality(), 1.0 / static_cast<double>(r)) * rho * static_cast<double>(r) /
              static_cast<double>(N);
  return net;
}

/// Random unit vector supported on a uniformly random subset of size `size`.
struct SparseProbe {
  std::vector<std::size_t> support;
  Vector coeffs;
};

inline SparseProbe random_sparse_unit(Engine& eng, std::size_t ambient, std::size_t size) {
  std::vector<std::size_t> all(ambient);
  for (std::size_t i = 0; i < ambient; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), eng);
  SparseProbe p;
  p.support.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
  std::sort(p.support.begin(), p.support.end());
  std::normal_distribution<double> normal;
  p.coeffs.resize(static_cast<Eigen::Index>(size));
  do {
    for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) p.coeffs[i] = normal(eng);
  } while (p.coeffs.norm() == 0.0);
  p.coeffs.normalize();
  return p;
}

/// Largest same-support distance over `probes` random r-sparse unit vectors.
inline double probe_net_coverage(const SparseNet& net, std::size_t probes, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < probes; ++t) {
    const std::size_t size = 1 + static_cast<std::size_t>(eng() % net.sparsity);
    const auto p = random_sparse_unit(eng, net.ambient, size);
    worst = std::max(worst, net.distance_within_support(p.support, p.coeffs));
  }
  return worst;
}

}  // namespace htcov
