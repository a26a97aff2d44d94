#pragma once

// Brute-force oracles for the restricted quadratic forms f, g and the vectors
// W of a Gram matrix, the quadratic-net inequality, and constant-free checks of
// the recursion steps built on them. Index sets are 0-based.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "htcov/distributions.hpp"
#include "htcov/errors.hpp"
#include "htcov/io.hpp"
#include "htcov/matrix_core.hpp"
#include "htcov/nets.hpp"
#include "htcov/order_stats.hpp"
#include "htcov/parallel.hpp"
#include "htcov/report.hpp"
#include "htcov/rng.hpp"
#include "htcov/spectral.hpp"

namespace htcov {

using IndexSet = std::vector<std::size_t>;

inline constexpr double kEnumerationEnvelope = 1e6;

struct QuadFormContext {
  GramMatrix gram;
  IndexSet C;
  IndexSet I;
  std::size_t k = 1;
  std::size_t m = 1;

  void validate() const;
};

struct QuadValue {
  double value = 0.0;
  /// False when the value is a sampled lower bound.
  bool exact = true;
};

struct Slack {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;

  static Slack of(double lhs, double rhs) { return {lhs, rhs, rhs - lhs}; }
  bool pass(double tol = 1e-9) const { return slack >= -tol; }
};

namespace detail {

inline IndexSet checked_set(std::span<const std::size_t> set, std::size_t N, const char* what) {
  IndexSet s(set.begin(), set.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw ParameterError(std::string(what) + " has repeated indices");
  }
  if (!s.empty() && s.back() >= N) throw ParameterError(std::string(what) + " index out of range");
  return s;
}

inline IndexSet intersect(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexSet difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline double envelope_count(std::size_t pool, std::size_t size) {
  double total = 0.0;
  for (std::size_t j = 1; j <= size; ++j) total += binomial(pool, j);
  return total;
}

inline Matrix principal_block(const Matrix& g, std::span<const std::size_t> s) {
  const auto d = static_cast<Eigen::Index>(s.size());
  Matrix b(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) b(i, j) = g(static_cast<Eigen::Index>(s[static_cast<std::size_t>(i)]),
                                                  static_cast<Eigen::Index>(s[static_cast<std::size_t>(j)]));
  }
  return b;
}

inline double lambda_max_small(const Matrix& b) {
  if (b.rows() == 1) return b(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

/// Largest singular value of a small dense block.
inline double sigma_max_small(const Matrix& b) {
  if (b.size() == 0) return 0.0;
  if (b.rows() == 1 || b.cols() == 1) return b.norm();
  const Matrix sq = b.rows() <= b.cols() ? Matrix(b * b.transpose()) : Matrix(b.transpose() * b);
  return std::sqrt(std::max(0.0, lambda_max_small(sq)));
}

}  // namespace detail

inline void QuadFormContext::validate() const {
  const auto N = static_cast<std::size_t>(gram.size());
  detail::checked_set(C, N, "C");
  detail::checked_set(I, N, "I");
  if (m < 1 || m > k || k > N) throw ParameterError("context needs 1 <= m <= k <= N");
}

struct FValueOptions {
  std::size_t fallback_samples = 20000;
  std::uint64_t seed = 1;
};

/// max over S subset of C, |S| = min(k, |C|), of lambda_max(G_S).
inline QuadValue f_value(const GramMatrix& g, std::size_t k, std::span<const std::size_t> C,
                         const FValueOptions& opts = {}) {
  if (k < 1) throw ParameterError("f_value needs k >= 1");
  const IndexSet c = detail::checked_set(C, static_cast<std::size_t>(g.size()), "C");
  if (c.empty()) return {0.0, true};
  const std::size_t s = std::min(k, c.size());
  const Matrix& G = g.entries();
  if (detail::envelope_count(c.size(), s) <= kEnumerationEnvelope) {
    double best = -std::numeric_limits<double>::infinity();
    if (s == c.size()) return {symmetric_extremes(detail::principal_block(G, c), {}, true).max, true};
    for_each_subset(c, s, [&](std::span<const std::size_t> sub) {
      best = std::max(best, detail::lambda_max_small(detail::principal_block(G, sub)));
    });
    return {best, true};
  }
  Engine eng = make_engine(opts.seed);
  IndexSet pool = c;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < opts.fallback_samples; ++t) {
    std::shuffle(pool.begin(), pool.end(), eng);
    IndexSet sub(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(s));
    best = std::max(best, symmetric_extremes(detail::principal_block(G, sub), {}, true).max);
  }
  return {best, false};
}

inline QuadValue f_value(const QuadFormContext& ctx, std::size_t k, std::span<const std::size_t> C,
                         const FValueOptions& opts = {}) {
  return f_value(ctx.gram, k, C, opts);
}

/// max over S subset of I cap C and T subset of I^c cap C, both of size at
/// most k, of sigma_max(G_{S,T}); 0 when either side is empty.
inline double g_value(const GramMatrix& g, std::size_t k, std::span<const std::size_t> C,
                      std::span<const std::size_t> I) {
  if (k < 1) throw ParameterError("g_value needs k >= 1");
  const auto N = static_cast<std::size_t>(g.size());
  const IndexSet c = detail::checked_set(C, N, "C");
  const IndexSet i = detail::checked_set(I, N, "I");
  const IndexSet left = detail::intersect(c, i);
  const IndexSet right = detail::difference(c, i);
  if (left.empty() || right.empty()) return 0.0;
  const std::size_t sl = std::min(k, left.size());
  const std::size_t sr = std::min(k, right.size());
  if (binomial(left.size(), sl) * binomial(right.size(), sr) > kEnumerationEnvelope) {
    throw ParameterError("g_value enumeration envelope exceeded");
  }
  const Matrix& G = g.entries();
  double best = 0.0;
  for_each_subset(left, sl, [&](std::span<const std::size_t> s) {
    for_each_subset(right, sr, [&](std::span<const std::size_t> t) {
      Matrix b(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(t.size()));
      for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t z = 0; z < t.size(); ++z) {
          b(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(z)) =
              G(static_cast<Eigen::Index>(s[a]), static_cast<Eigen::Index>(t[z]));
        }
      }
      best = std::max(best, detail::sigma_max_small(b));
    });
  });
  return best;
}

inline double g_value(const QuadFormContext& ctx, std::size_t k, std::span<const std::size_t> C,
                      std::span<const std::size_t> I) {
  return g_value(ctx.gram, k, C, I);
}

/// W_{v,i} = <X_i, sum_j v_j X_j> = (G v)_i.
inline Vector w_values(const GramMatrix& g, const Vector& v) {
  if (v.size() != g.size()) throw ParameterError("w_values: vector length must equal N");
  return g.entries() * v;
}

namespace detail {

/// sup over k-sparse unit y on `from` of max_{l in to} |W_{y,l}|: the largest
/// norm of the top-k entries of |G_{l, from}|.
inline double sparse_row_sup(const Matrix& G, const IndexSet& from, const IndexSet& to, std::size_t k) {
  double best = 0.0;
  std::vector<double> row(from.size());
  for (std::size_t l : to) {
    for (std::size_t a = 0; a < from.size(); ++a) {
      const double v = G(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(from[a]));
      row[a] = v * v;
    }
    std::sort(row.begin(), row.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t a = 0; a < std::min(k, row.size()); ++a) acc += row[a];
    best = std::max(best, std::sqrt(acc));
  }
  return best;
}

}  // namespace detail

struct RecurrentCheck {
  Slack slack;
  double g1 = 0.0;
  double term_left = 0.0;
  double term_right = 0.0;
};

/// g(k,C,I) <= g(1,C,I) + sqrt(k) sup_y max_{l in I^c cap C} |W_{y,l}| + (mirror), m = 1.
inline RecurrentCheck check_raw_recurrent(const GramMatrix& g, std::size_t k, std::span<const std::size_t> C,
                                          std::span<const std::size_t> I) {
  const auto N = static_cast<std::size_t>(g.size());
  if (k < 1 || k > N) throw ParameterError("check_raw_recurrent needs 1 <= k <= N");
  const IndexSet c = detail::checked_set(C, N, "C");
  const IndexSet i = detail::checked_set(I, N, "I");
  const IndexSet left = detail::intersect(c, i);
  const IndexSet right = detail::difference(c, i);
  RecurrentCheck out;
  const double lhs = g_value(g, k, c, i);
  out.g1 = g_value(g, 1, c, i);
  if (!left.empty() && !right.empty()) {
    const double rk = std::sqrt(static_cast<double>(k));
    out.term_left = rk * detail::sparse_row_sup(g.entries(), left, right, k);
    out.term_right = rk * detail::sparse_row_sup(g.entries(), right, left, k);
  }
  out.slack = Slack::of(lhs, out.g1 + out.term_left + out.term_right);
  return out;
}

inline RecurrentCheck check_raw_recurrent(const QuadFormContext& ctx) {
  ctx.validate();
  return check_raw_recurrent(ctx.gram, ctx.k, ctx.C, ctx.I);
}

// ---------------------------------------------------------------------------
// Quadratic forms over nets

struct NetQuadformReport {
  double probe_sup = 0.0;
  double net_sup = 0.0;
  double net_bound = 0.0;
  /// max |eigenvalue| from a dense eigensolver.
  double exact_sup = 0.0;
  std::size_t net_size = 0;
  bool pass = false;
};

/// sup_y |<My,y>| <= (1 - 2 rho)^{-1} sup_{z in net} |<Mz,z>| over a dense rho-net.
inline NetQuadformReport net_quadform_check(const Matrix& M, double rho, std::size_t probes, std::uint64_t seed) {
  if (M.rows() != M.cols() || M.rows() < 1) throw ParameterError("net_quadform_check needs a square matrix");
  if (M.rows() > 8) throw ParameterError("net_quadform_check envelope: n <= 8");
  if (!(rho > 0.0 && rho < 0.5)) throw ParameterError("net_quadform_check needs rho in (0, 1/2)");
  detail::require_symmetric(M);
  const auto n = static_cast<std::size_t>(M.rows());
  const SphereNet net = dense_sphere_net(n, rho);

  NetQuadformReport rep;
  rep.net_size = static_cast<std::size_t>(net.points.cols());
  rep.net_sup = ((M * net.points).cwiseProduct(net.points)).colwise().sum().cwiseAbs().maxCoeff();
  rep.net_bound = rep.net_sup / (1.0 - 2.0 * rho);

  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal;
  Vector y(M.rows());
  for (std::size_t t = 0; t < probes; ++t) {
    do {
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = normal(eng);
    } while (y.norm() == 0.0);
    y.normalize();
    rep.probe_sup = std::max(rep.probe_sup, std::abs(y.dot(M * y)));
  }
  const ExtremeEigen ex = detail::dense_extremes(M);
  rep.exact_sup = std::max(std::abs(ex.min), std::abs(ex.max));
  const double tol = 1e-12 * std::max(1.0, rep.net_bound);
  rep.pass = rep.probe_sup <= rep.net_bound + tol && rep.exact_sup <= rep.net_bound + tol;
  return rep;
}

struct NetPassingReport {
  Slack slack;
  double net_term = 0.0;
  double E = 0.0;
  std::size_t probes_checked = 0;
};

namespace detail {

inline Vector sparse_apply(const Matrix& T, std::span<const std::size_t> support, const Vector& coeffs) {
  Vector out = Vector::Zero(T.rows());
  for (std::size_t a = 0; a < support.size(); ++a) {
    out += coeffs[static_cast<Eigen::Index>(a)] * T.col(static_cast<Eigen::Index>(support[a]));
  }
  return out.cwiseAbs();
}

inline double kmax_of(const Vector& v, std::size_t k) {
  return kmax(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), k);
}

}  // namespace detail

/// For every probe u (random h-sparse unit vectors plus the net points):
/// kmax_r(|Tu|) <= 2 sup_{v in net} kmax_{floor(r/2)}(|Tv|) + (4 rho / sqrt r) E,
/// where E = max over |S| = h, |U| = r of sigma_max(T_{U,S}).
inline NetPassingReport check_net_passing(const Matrix& T, std::size_t r, std::size_t h, double rho,
                                          const SparseNet& net, std::size_t probes = 10000,
                                          std::uint64_t seed = 1) {
  const auto p = static_cast<std::size_t>(T.rows());
  const auto q = static_cast<std::size_t>(T.cols());
  if (p < 1 || q < 1 || p > 12 || q > 12) throw ParameterError("check_net_passing envelope: p, q <= 12");
  if (h < 1 || h > 4 || h > q || r < 2) throw ParameterError("check_net_passing needs 1 <= h <= min(q, 4), r >= 2");
  if (net.ambient != q || net.sparsity != h || net.rho != rho) {
    throw ParameterError("check_net_passing: net does not match (q, h, rho)");
  }
  const std::size_t sh = std::min(h, q);
  const std::size_t sr = std::min(r, p);
  if (binomial(q, sh) * binomial(p, sr) > kEnumerationEnvelope) {
    throw ParameterError("check_net_passing enumeration envelope exceeded");
  }

  NetPassingReport rep;
  IndexSet rows(p), cols(q);
  for (std::size_t i = 0; i < p; ++i) rows[i] = i;
  for (std::size_t j = 0; j < q; ++j) cols[j] = j;
  for_each_subset(cols, sh, [&](std::span<const std::size_t> s) {
    Matrix ts(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(sh));
    for (std::size_t a = 0; a < sh; ++a) ts.col(static_cast<Eigen::Index>(a)) = T.col(static_cast<Eigen::Index>(s[a]));
    for_each_subset(rows, sr, [&](std::span<const std::size_t> u) {
      Matrix b(static_cast<Eigen::Index>(sr), static_cast<Eigen::Index>(sh));
      for (std::size_t a = 0; a < sr; ++a) b.row(static_cast<Eigen::Index>(a)) = ts.row(static_cast<Eigen::Index>(u[a]));
      rep.E = std::max(rep.E, detail::sigma_max_small(b));
    });
  });

  double lhs = 0.0;
  net.for_each_point([&](std::span<const std::size_t> support, const auto& coeffs) {
    const Vector tv = detail::sparse_apply(T, support, coeffs);
    rep.net_term = std::max(rep.net_term, detail::kmax_of(tv, r / 2));
    lhs = std::max(lhs, detail::kmax_of(tv, r));
    ++rep.probes_checked;
  });
  Engine eng = make_engine(seed);
  for (std::size_t t = 0; t < probes; ++t) {
    const std::size_t size = 1 + static_cast<std::size_t>(eng() % h);
    const SparseProbe u = random_sparse_unit(eng, q, size);
    lhs = std::max(lhs, detail::kmax_of(detail::sparse_apply(T, u.support, u.coeffs), r));
    ++rep.probes_checked;
  }
  const double rhs = 2.0 * rep.net_term + 4.0 * rho / std::sqrt(static_cast<double>(r)) * rep.E;
  rep.slack = Slack::of(lhs, rhs);
  return rep;
}

// ---------------------------------------------------------------------------
// Verification corpora

struct QuadSuiteConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t instances = 0;  // 0: suite default
};

inline const char* kSlackHeader = "suite,instance_id,lhs,rhs,slack,pass_flag";

inline std::string slack_row(const std::string& suite, std::size_t id, const Slack& s, bool pass) {
  return csv_join({suite, std::to_string(id), fmt_double(s.lhs), fmt_double(s.rhs), fmt_double(s.slack),
                   pass ? "1" : "0"});
}

/// Random small sample: family cycles with the instance id, N in [2, max_N], n in [1, max_n].
inline SampleMatrix make_quad_instance(std::uint64_t seed, std::size_t id, std::size_t max_N, std::size_t max_n) {
  Engine eng = make_engine(derive_seed(seed, {0x40, id}));
  const std::size_t n = 1 + static_cast<std::size_t>(eng() % max_n);
  const std::size_t N = 2 + static_cast<std::size_t>(eng() % (max_N - 1));
  DistributionSpec spec;
  switch (id % 5) {
    case 0: spec = DistributionSpec::gaussian(n); break;
    case 1: spec = DistributionSpec::pareto(n, 3.0); break;
    case 2: spec = DistributionSpec::student_t(n, 3.0); break;
    case 3: spec = DistributionSpec::spherical_pareto(n, 3.0); break;
    default: spec = DistributionSpec::coordinate_discrete(n); break;
  }
  return sample_matrix(spec, N, derive_seed(seed, {0x41, id}));
}

inline IndexSet random_subset(Engine& eng, std::size_t N, double keep) {
  std::bernoulli_distribution coin(keep);
  IndexSet s;
  for (std::size_t i = 0; i < N; ++i) {
    if (coin(eng)) s.push_back(i);
  }
  return s;
}

inline void merge_rows(SuiteReport& rep, const std::vector<std::vector<std::string>>& rows,
                       const std::vector<std::vector<std::string>>& failures) {
  for (const auto& r : rows) rep.rows.insert(rep.rows.end(), r.begin(), r.end());
  for (const auto& f : failures) {
    for (const auto& msg : f) rep.fail(msg);
  }
}

/// f(N,[N]) = lambda_max(A^T A) on random instances (N <= 8, n <= 6).
inline SuiteReport run_identity_corpus(const QuadSuiteConfig& cfg) {
  SuiteReport rep{"quadforms/identity", kSlackHeader};
  const std::size_t count = cfg.instances ? cfg.instances : 100;
  std::vector<std::vector<std::string>> rows(count), failures(count);
  parallel_for(count, cfg.workers, [&](std::size_t id) {
    const SampleMatrix a = make_quad_instance(cfg.seed, id, 8, 6);
    IndexSet all(a.N());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const double f = f_value(gram(a), a.N(), all).value;
    const Matrix ata = a.rows.transpose() * a.rows;
    const double lam = detail::dense_extremes(ata).max;
    const double tol = 1e-9 * std::max(std::abs(lam), std::numeric_limits<double>::min());
    const Slack s{f, lam, tol - std::abs(f - lam)};
    const bool ok = s.slack >= 0.0;
    rows[id].push_back(slack_row("identity", id, s, ok));
    if (!ok) failures[id].push_back("identity off at instance " + std::to_string(id));
  });
  merge_rows(rep, rows, failures);
  return rep;
}

/// Monotonicity of f, symmetry of g, g(k) <= f(2k), and W against raw rows.
inline SuiteReport run_quadform_properties(const QuadSuiteConfig& cfg) {
  SuiteReport rep{"quadforms/properties", kSlackHeader};
  const std::size_t count = cfg.instances ? cfg.instances : 100;
  std::vector<std::vector<std::string>> rows(count), failures(count);
  parallel_for(count, cfg.workers, [&](std::size_t id) {
    const SampleMatrix a = make_quad_instance(cfg.seed, id, 9, 6);
    const GramMatrix g = gram(a);
    const std::size_t N = a.N();
    Engine eng = make_engine(derive_seed(cfg.seed, {0x42, id}));
    const IndexSet C = random_subset(eng, N, 0.8);
    const IndexSet I = random_subset(eng, N, 0.5);
    IndexSet Ic;
    for (std::size_t i = 0; i < N; ++i) {
      if (!std::binary_search(I.begin(), I.end(), i)) Ic.push_back(i);
    }
    const std::size_t k = 1 + static_cast<std::size_t>(eng() % std::min<std::size_t>(N, 4));
    auto record = [&](const char* name, const Slack& s) {
      const bool ok = s.pass();
      rows[id].push_back(slack_row(name, id, s, ok));
      if (!ok) failures[id].push_back(std::string(name) + " failed at instance " + std::to_string(id));
    };
    const double fk = f_value(g, k, C).value;
    if (k < N) record("f-monotone-k", Slack::of(fk, f_value(g, k + 1, C).value));
    IndexSet bigger = C;
    for (std::size_t i = 0; i < N; ++i) {
      if (!std::binary_search(C.begin(), C.end(), i)) {
        bigger.push_back(i);
        break;
      }
    }
    std::sort(bigger.begin(), bigger.end());
    record("f-monotone-C", Slack::of(fk, f_value(g, k, bigger).value));
    const double gk = g_value(g, k, C, I);
    const double gs = g_value(g, k, C, Ic);
    const double gtol = 1e-9 * std::max(1.0, gk);
    record("g-symmetry", Slack{gk, gs, gtol - std::abs(gk - gs)});
    record("g-below-f2k", Slack::of(gk, f_value(g, 2 * k, C).value));
    Vector v(static_cast<Eigen::Index>(N));
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(eng);
    const Vector w = w_values(g, v);
    const Vector direct_sum = a.rows.transpose() * v;
    double err = 0.0;
    double scale = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < a.rows.cols(); ++c) acc += a.rows(i, c) * direct_sum[c];
      err = std::max(err, std::abs(acc - w[i]));
      scale = std::max(scale, std::abs(acc));
    }
    record("w-raw-rows", Slack{err, 1e-10 * scale, 1e-10 * scale - err});
  });
  merge_rows(rep, rows, failures);
  return rep;
}

/// Raw recurrence with m = 1 on random instances (N <= 10, n <= 6, k <= 4).
inline SuiteReport run_recursion_suite(const QuadSuiteConfig& cfg) {
  SuiteReport rep{"recursion", kSlackHeader};
  const std::size_t count = cfg.instances ? cfg.instances : 200;
  std::vector<std::vector<std::string>> rows(count), failures(count);
  parallel_for(count, cfg.workers, [&](std::size_t id) {
    const SampleMatrix a = make_quad_instance(cfg.seed ^ 0x5eedULL, id, 10, 6);
    const std::size_t N = a.N();
    Engine eng = make_engine(derive_seed(cfg.seed, {0x43, id}));
    QuadFormContext ctx{gram(a), random_subset(eng, N, 0.85), random_subset(eng, N, 0.5), 1, 1};
    ctx.k = 1 + static_cast<std::size_t>(eng() % std::min<std::size_t>(N, 4));
    const RecurrentCheck chk = check_raw_recurrent(ctx);
    rows[id].push_back(slack_row("raw-recurrent", id, chk.slack, chk.slack.pass()));
    if (!chk.slack.pass()) failures[id].push_back("raw recurrence violated at instance " + std::to_string(id));
  });
  merge_rows(rep, rows, failures);
  return rep;
}

/// Net-passing inequality on random (T, net) instances.
inline SuiteReport run_net_passing_corpus(const QuadSuiteConfig& cfg, std::size_t probes = 10000) {
  SuiteReport rep{"nets/net-passing", kSlackHeader};
  const std::size_t count = cfg.instances ? cfg.instances : 100;
  std::vector<std::vector<std::string>> rows(count), failures(count);
  parallel_for(count, cfg.workers, [&](std::size_t id) {
    Engine eng = make_engine(derive_seed(cfg.seed, {0x44, id}));
    const std::size_t p = 2 + static_cast<std::size_t>(eng() % 7);
    const std::size_t q = 2 + static_cast<std::size_t>(eng() % 7);
    const std::size_t h = 1 + static_cast<std::size_t>(eng() % std::min<std::size_t>(q, 3));
    const std::size_t r = 2 + static_cast<std::size_t>(eng() % std::min<std::size_t>(p - 1, 3));
    const double rho = std::array<double, 3>{0.3, 0.5, 0.8}[id % 3];
    std::student_t_distribution<double> heavy(3.0);
    std::normal_distribution<double> normal;
    Matrix T(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      for (Eigen::Index j = 0; j < T.cols(); ++j) T(i, j) = id % 2 ? heavy(eng) : normal(eng);
    }
    if (id % 7 == 0) T.row(0).setZero();
    const SparseNet net = build_sparse_net(q, h, rho);
    const NetPassingReport chk = check_net_passing(T, r, h, rho, net, probes, derive_seed(cfg.seed, {0x45, id}));
    rows[id].push_back(slack_row("net-passing", id, chk.slack, chk.slack.pass()));
    if (!chk.slack.pass()) failures[id].push_back("net passing violated at instance " + std::to_string(id));
  });
  merge_rows(rep, rows, failures);
  return rep;
}

/// Coverage probes on sparse nets and the quadratic-net inequality.
inline SuiteReport run_net_coverage(const QuadSuiteConfig& cfg) {
  SuiteReport rep{"nets/coverage", kSlackHeader};
  struct NetCase {
    std::size_t N, r;
    double rho;
  };
  const std::vector<NetCase> cases{{1, 1, 0.5}, {2, 1, 1.0}, {6, 2, 0.3}, {8, 3, 0.5}, {10, 4, 0.6}, {12, 2, 0.2}};
  std::size_t id = 0;
  for (const auto& c : cases) {
    const SparseNet net = build_sparse_net(c.N, c.r, c.rho);
    const double worst = probe_net_coverage(net, 10000, derive_seed(cfg.seed, {0x46, id}));
    const Slack s = Slack::of(worst, c.rho);
    rep.rows.push_back(slack_row("coverage", id, s, s.pass(0.0)));
    rep.notes.push_back("net N=" + std::to_string(c.N) + " r=" + std::to_string(c.r) + " rho=" + fmt_double(c.rho) +
                        " size=" + fmt_double(net.cardinality()) + " C_net=" + fmt_double(net.C_net));
    if (!s.pass(0.0)) rep.fail("net coverage above rho for case " + std::to_string(id));
    ++id;
  }
  Engine eng = make_engine(derive_seed(cfg.seed, {0x47}));
  std::normal_distribution<double> normal;
  struct QuadCase {
    Matrix M;
    double rho;
    std::size_t probes;
  };
  std::vector<QuadCase> qcases;
  qcases.push_back({Matrix::Identity(3, 3), 0.25, 10000});
  qcases.push_back({Matrix::Zero(4, 4), 0.25, 1000});
  for (std::size_t t = 0; t < 3; ++t) {
    Matrix m(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) m(i, j) = normal(eng);
    }
    qcases.push_back({Matrix(0.5 * (m + m.transpose())), 0.2, 100000});
  }
  for (const auto& qc : qcases) {
    const NetQuadformReport r = net_quadform_check(qc.M, qc.rho, qc.probes, derive_seed(cfg.seed, {0x48, id}));
    const Slack s = Slack::of(std::max(r.probe_sup, r.exact_sup), r.net_bound);
    rep.rows.push_back(slack_row("quadform-net", id, s, r.pass));
    if (!r.pass) rep.fail("quadratic-net inequality violated for case " + std::to_string(id));
    ++id;
  }
  return rep;
}

inline SuiteReport combine_reports(const std::string& name, const std::vector<SuiteReport>& parts) {
  SuiteReport all{name, kSlackHeader};
  for (const auto& part : parts) {
    all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
    for (const auto& n : part.notes) all.notes.push_back(part.name + ": " + n);
    all.pass = all.pass && part.pass;
  }
  return all;
}

inline SuiteReport run_nets_suite(const QuadSuiteConfig& cfg) {
  return combine_reports("nets", {run_net_coverage(cfg), run_net_passing_corpus(cfg)});
}

inline SuiteReport run_quadforms_suite(const QuadSuiteConfig& cfg) {
  return combine_reports("quadforms", {run_identity_corpus(cfg), run_quadform_properties(cfg)});
}

}  // namespace htcov
