#pragma once

// Sparsifying projection: for T (m x k) and a unit vector y, find a coordinate
// projection P of rank <= delta k such that delta^2 min_l |Ty|_l is controlled
// by max |t_ij| / sqrt(k) plus the floor(m/4)-th largest entry of |TPy|.
//
// Existence is shown by a random-selector argument; the search below follows
// the same case analysis and retries the random selector a bounded number of
// times.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htcov/distributions.hpp"
#include "htcov/errors.hpp"
#include "htcov/io.hpp"
#include "htcov/order_stats.hpp"
#include "htcov/parallel.hpp"
#include "htcov/report.hpp"
#include "htcov/rng.hpp"

namespace htcov {

enum class SparsifyCase { big_coordinate_projection, max_entry_domination, randomized_projection };

inline std::string_view case_name(SparsifyCase c) {
  switch (c) {
    case SparsifyCase::big_coordinate_projection: return "big-coordinate-projection";
    case SparsifyCase::max_entry_domination: return "max-entry-domination";
    case SparsifyCase::randomized_projection: return "randomized-projection";
  }
  return "unknown";
}

struct SparsifyCertificate {
  SparsifyCase kind = SparsifyCase::big_coordinate_projection;
  std::vector<std::size_t> projection_support;  // columns kept by P, ascending
  std::vector<std::size_t> survivors;           // rows with |TPy|_i >= c |Ty|_i (randomized case)
  int draws_used = 0;
  double measured_ratio = 0.0;
  /// (i0, j0) certifying max-entry domination.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  /// min_l |Ty|_l = 0: the bound is vacuous.
  bool trivial = false;

  friend bool operator==(const SparsifyCertificate&, const SparsifyCertificate&) = default;
};

/// Raised when no random selector passed within max_draws; carries the best draw.
class SparsifySearchFailure : public std::runtime_error {
 public:
  explicit SparsifySearchFailure(SparsifyCertificate best)
      : std::runtime_error("sparsify: no admissible selector within the draw budget"), best_(std::move(best)) {}
  const SparsifyCertificate& best() const noexcept { return best_; }

 private:
  SparsifyCertificate best_;
};

namespace detail {

inline Vector project_apply(const Matrix& t, const Vector& y, const std::vector<std::size_t>& support) {
  Vector out = Vector::Zero(t.rows());
  for (std::size_t j : support) out += t.col(static_cast<Eigen::Index>(j)) * y[static_cast<Eigen::Index>(j)];
  return out;
}

/// delta^2 min|Ty| / (max|t_ij| / sqrt(k) + kmax_{floor(m/4)} |TPy|).
inline double sparsify_ratio(const Matrix& t, const Vector& y, double delta, const std::vector<std::size_t>& support) {
  const Vector ty = t * y;
  const Vector tpy = project_apply(t, y, support);
  const double num = delta * delta * ty.cwiseAbs().minCoeff();
  const Vector abs_tpy = tpy.cwiseAbs();
  const auto q = static_cast<std::size_t>(t.rows() / 4);
  const double den = t.cwiseAbs().maxCoeff() / std::sqrt(static_cast<double>(t.cols())) + kmax(std::span<const double>(abs_tpy.data(), static_cast<std::size_t>(abs_tpy.size())), q);
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

struct SparsifySetup {
  Vector ty;
  std::vector<std::size_t> J, Jc, I;
  Vector tjy;
};

inline SparsifySetup sparsify_setup(const Matrix& t, const Vector& y, double delta) {
  SparsifySetup s;
  const auto k = static_cast<double>(t.cols());
  const double big = 2.0 / std::sqrt(delta * k);
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    (std::abs(y[j]) >= big ? s.J : s.Jc).push_back(static_cast<std::size_t>(j));
  }
  s.ty = t * y;
  s.tjy = project_apply(t, y, s.J);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (std::abs(s.ty[i]) > 2.0 * std::abs(s.tjy[i])) s.I.push_back(static_cast<std::size_t>(i));
  }
  return s;
}

inline double domination_factor(double delta, double C_K) {
  return delta * std::sqrt(delta) / (8.0 * std::numbers::e * C_K);
}

inline double survivor_factor(double delta, double C_K) {
  return delta * std::sqrt(delta) / (16.0 * std::numbers::e * C_K);
}

}  // namespace detail

struct SparsifyOptions {
  double delta = 0.5;
  double C_K = 1.0;
  int max_draws = 64;
  std::uint64_t seed = 0;
};

inline SparsifyCertificate sparsify(const Matrix& t, const Vector& y, const SparsifyOptions& opt) {
  const double delta = opt.delta;
  const auto m = t.rows();
  const auto k = t.cols();
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("sparsify needs delta in (0, 1]");
  if (static_cast<double>(k) < 12.0 / (delta * delta)) throw ParameterError("sparsify needs k >= 12 / delta^2");
  if (m < 4) throw ParameterError("sparsify needs m >= 4");
  if (y.size() != k) throw ParameterError("sparsify: y has the wrong length");
  if (std::abs(y.norm() - 1.0) > 1e-9) throw ParameterError("sparsify needs a unit vector y");
  if (!(opt.C_K > 0.0) || opt.max_draws < 1) throw ParameterError("sparsify needs C_K > 0 and max_draws >= 1");

  const auto s = detail::sparsify_setup(t, y, delta);
  SparsifyCertificate cert;

  if (s.ty.cwiseAbs().minCoeff() == 0.0) {
    cert.kind = SparsifyCase::big_coordinate_projection;
    cert.projection_support = s.J;
    cert.trivial = true;
    cert.measured_ratio = detail::sparsify_ratio(t, y, delta, cert.projection_support);
    return cert;
  }

  // Big coordinates already dominate at least half of the rows.
  if (2 * s.I.size() < static_cast<std::size_t>(m)) {
    cert.kind = SparsifyCase::big_coordinate_projection;
    cert.projection_support = s.J;
    cert.measured_ratio = detail::sparsify_ratio(t, y, delta, cert.projection_support);
    return cert;
  }

  // A single entry dominates its row's small-coordinate sum.
  const double dom = detail::domination_factor(delta, opt.C_K);
  for (std::size_t i : s.I) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double small_sum = std::abs(s.ty[ii] - s.tjy[ii]);
    for (std::size_t j : s.Jc) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (std::abs(t(ii, jj) * y[jj]) >= dom * small_sum) {
        cert.kind = SparsifyCase::max_entry_domination;
        cert.witness = std::make_pair(i, j);
        cert.measured_ratio = detail::sparsify_ratio(t, y, delta, cert.projection_support);
        return cert;
      }
    }
  }

  // Random Bernoulli(delta/2) selectors on the small coordinates.
  const double keep = detail::survivor_factor(delta, opt.C_K);
  const double rank_cap = delta * static_cast<double>(k);
  const std::size_t needed = (s.I.size() + 1) / 2;
  Engine eng = make_engine(opt.seed);
  std::bernoulli_distribution coin(delta / 2.0);
  SparsifyCertificate best;
  best.kind = SparsifyCase::randomized_projection;
  bool have_best = false;
  for (int draw = 1; draw <= opt.max_draws; ++draw) {
    SparsifyCertificate c;
    c.kind = SparsifyCase::randomized_projection;
    c.draws_used = draw;
    for (std::size_t j : s.Jc) {
      if (coin(eng)) c.projection_support.push_back(j);
    }
    if (static_cast<double>(c.projection_support.size()) > rank_cap) continue;
    const Vector tpy = detail::project_apply(t, y, c.projection_support);
    for (std::size_t i : s.I) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (std::abs(tpy[ii]) >= keep * std::abs(s.ty[ii])) c.survivors.push_back(i);
    }
    if (c.survivors.size() >= needed) {
      c.measured_ratio = detail::sparsify_ratio(t, y, delta, c.projection_support);
      return c;
    }
    if (!have_best || c.survivors.size() > best.survivors.size()) {
      best = c;
      have_best = true;
    }
  }
  best.draws_used = opt.max_draws;
  if (have_best) best.measured_ratio = detail::sparsify_ratio(t, y, delta, best.projection_support);
  throw SparsifySearchFailure(best);
}

struct CertificateCheck {
  bool rank_ok = true;
  bool case_ok = true;
  bool ratio_ok = true;
  double measured_ratio = 0.0;
  std::vector<std::string> messages;

  bool pass() const { return rank_ok && case_ok && ratio_ok; }
};

/// Re-derives every certificate property from (T, y) and checks the measured
/// ratio against C_cap.
inline CertificateCheck verify_certificate(const Matrix& t, const Vector& y, double delta, double C_K,
                                           const SparsifyCertificate& cert, double C_cap) {
  CertificateCheck out;
  const auto m = static_cast<std::size_t>(t.rows());
  const auto k = static_cast<double>(t.cols());
  if (static_cast<double>(cert.projection_support.size()) > delta * k) {
    out.rank_ok = false;
    out.messages.push_back("rank " + std::to_string(cert.projection_support.size()) + " exceeds delta*k");
  }
  for (std::size_t j : cert.projection_support) {
    if (j >= static_cast<std::size_t>(t.cols())) {
      out.case_ok = false;
      out.messages.push_back("projection index out of range");
      return out;
    }
  }
  const auto s = detail::sparsify_setup(t, y, delta);
  const Vector tpy = detail::project_apply(t, y, cert.projection_support);

  switch (cert.kind) {
    case SparsifyCase::big_coordinate_projection: {
      if (cert.projection_support != s.J) {
        out.case_ok = false;
        out.messages.push_back("projection support differs from the big-coordinate set J");
      }
      std::size_t dominated = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        dominated += std::abs(s.ty[ii]) <= 2.0 * std::abs(tpy[ii]);
      }
      if (!cert.trivial && 2 * dominated < m) {
        out.case_ok = false;
        out.messages.push_back("fewer than m/2 rows dominated by the big coordinates");
      }
      break;
    }
    case SparsifyCase::max_entry_domination: {
      if (!cert.projection_support.empty()) {
        out.case_ok = false;
        out.messages.push_back("max-entry certificate must carry an empty projection");
      }
      if (!cert.witness) {
        out.case_ok = false;
        out.messages.push_back("max-entry certificate without witness");
        break;
      }
      const auto [i0, j0] = *cert.witness;
      const bool in_i = std::binary_search(s.I.begin(), s.I.end(), i0);
      const bool in_jc = std::binary_search(s.Jc.begin(), s.Jc.end(), j0);
      const auto ii = static_cast<Eigen::Index>(i0);
      const auto jj = static_cast<Eigen::Index>(j0);
      if (!in_i || !in_jc ||
          std::abs(t(ii, jj) * y[jj]) < detail::domination_factor(delta, C_K) * std::abs(s.ty[ii] - s.tjy[ii])) {
        out.case_ok = false;
        out.messages.push_back("witness does not satisfy the domination inequality");
      }
      break;
    }
    case SparsifyCase::randomized_projection: {
      if (cert.survivors.size() < m / 4) {
        out.case_ok = false;
        out.messages.push_back("survivor count below floor(m/4)");
      }
      const double keep = detail::survivor_factor(delta, C_K);
      for (std::size_t i : cert.survivors) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (i >= m || std::abs(tpy[ii]) < keep * std::abs(s.ty[ii])) {
          out.case_ok = false;
          out.messages.push_back("survivor " + std::to_string(i) + " violates the survivor inequality");
        }
      }
      for (std::size_t j : cert.projection_support) {
        if (std::binary_search(s.J.begin(), s.J.end(), j)) {
          out.case_ok = false;
          out.messages.push_back("randomized projection selects a big coordinate");
          break;
        }
      }
      break;
    }
  }

  out.measured_ratio = detail::sparsify_ratio(t, y, delta, cert.projection_support);
  if (!(out.measured_ratio <= C_cap)) {
    out.ratio_ok = false;
    out.messages.push_back("measured ratio " + fmt_double(out.measured_ratio) + " above cap");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random corpus

struct SparsifyInstance {
  Matrix t;
  Vector y;
  double delta = 0.5;
  std::string family;
};

/// Deterministic corpus instance. T is gaussian, heavy-tailed (Student-t 3) or
/// positive-mean; y is a random unit vector, a positive one, or a spiky one.
inline SparsifyInstance make_sparsify_instance(std::uint64_t seed, std::size_t id) {
  Engine eng = make_engine(derive_seed(seed, {0x30, id}));
  static constexpr std::size_t kMs[] = {4, 5, 8, 12, 16, 24, 32};
  static constexpr Eigen::Index kKs[] = {48, 64, 96, 128, 256, 512};
  static constexpr double kDeltas[] = {0.5, 0.75, 1.0};
  const auto m = static_cast<Eigen::Index>(kMs[eng() % std::size(kMs)]);
  const Eigen::Index k = kKs[eng() % std::size(kKs)];
  SparsifyInstance inst;
  inst.delta = kDeltas[eng() % std::size(kDeltas)];
  const int tfam = static_cast<int>(id % 3);
  const int yfam = static_cast<int>((id / 3) % 3);
  std::normal_distribution<double> normal;
  std::student_t_distribution<double> heavy(3.0);
  inst.t.resize(m, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      inst.t(i, j) = tfam == 0 ? normal(eng) : tfam == 1 ? heavy(eng) : 1.0 + 0.1 * normal(eng);
    }
  }
  inst.y.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    inst.y[j] = yfam == 1 ? std::abs(normal(eng)) : normal(eng);
  }
  if (yfam == 2) {
    for (Eigen::Index j = 0; j < k; ++j) inst.y[j] *= 0.05;
    inst.y[static_cast<Eigen::Index>(eng() % static_cast<std::uint64_t>(k))] += 1.0;
  }
  inst.y.normalize();
  static constexpr const char* kT[] = {"gaussian", "student-t3", "positive"};
  static constexpr const char* kY[] = {"random", "positive", "spiky"};
  inst.family = std::string(kT[tfam]) + "/" + kY[yfam];
  return inst;
}

struct SparsifySuiteConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t instances = 1000;
  double C_K = 8.0;
  int max_draws = 64;
  double C_cap = 1e4;
};

struct SparsifyCorpusStats {
  std::size_t instances = 0;
  std::size_t rank_violations = 0;
  std::size_t survivor_violations = 0;
  std::size_t case_violations = 0;
  std::size_t search_failures = 0;
  std::size_t ratio_violations = 0;
  std::size_t per_case[3] = {0, 0, 0};
  double max_ratio = 0.0;

  double failure_rate() const {
    return instances == 0 ? 0.0 : static_cast<double>(search_failures) / static_cast<double>(instances);
  }
};

/// Runs sparsify + verify_certificate over the corpus. CSV:
/// instance_id,case,rank,survivors,draws_used,measured_ratio,pass_flag.
inline SuiteReport run_sparsify_suite(const SparsifySuiteConfig& cfg, SparsifyCorpusStats* stats_out = nullptr) {
  SuiteReport rep{"sparsify", "instance_id,case,rank,survivors,draws_used,measured_ratio,pass_flag"};
  struct Outcome {
    SparsifyCertificate cert;
    CertificateCheck check;
    bool failed = false;
  };
  std::vector<Outcome> out(cfg.instances);
  parallel_for(cfg.instances, cfg.workers, [&](std::size_t id) {
    const auto inst = make_sparsify_instance(cfg.seed, id);
    SparsifyOptions opt{inst.delta, cfg.C_K, cfg.max_draws, derive_seed(cfg.seed, {0x31, id})};
    try {
      out[id].cert = sparsify(inst.t, inst.y, opt);
    } catch (const SparsifySearchFailure& f) {
      out[id].cert = f.best();
      out[id].failed = true;
    }
    out[id].check = verify_certificate(inst.t, inst.y, inst.delta, cfg.C_K, out[id].cert, cfg.C_cap);
  });

  SparsifyCorpusStats st;
  st.instances = cfg.instances;
  for (std::size_t id = 0; id < cfg.instances; ++id) {
    const auto& o = out[id];
    const bool rank_bad = !o.check.rank_ok;
    st.rank_violations += rank_bad;
    if (o.failed) {
      ++st.search_failures;
    } else {
      st.per_case[static_cast<int>(o.cert.kind)]++;
      st.case_violations += !o.check.case_ok;
      if (o.cert.kind == SparsifyCase::randomized_projection && !o.check.case_ok) ++st.survivor_violations;
      st.ratio_violations += !o.check.ratio_ok;
      if (std::isfinite(o.check.measured_ratio)) st.max_ratio = std::max(st.max_ratio, o.check.measured_ratio);
    }
    const bool pass = !o.failed && o.check.pass();
    rep.rows.push_back(csv_join({std::to_string(id), o.failed ? "search-failure" : std::string(case_name(o.cert.kind)),
                                 std::to_string(o.cert.projection_support.size()), std::to_string(o.cert.survivors.size()),
                                 std::to_string(o.cert.draws_used), fmt_double(o.check.measured_ratio), pass ? "1" : "0"}));
  }
  // Reference point: failure rate at C_K = 1 on the gaussian-T part of the corpus.
  std::vector<std::size_t> gaussian_ids;
  for (std::size_t id = 0; id < cfg.instances; id += 3) gaussian_ids.push_back(id);
  std::vector<char> ref_failed(gaussian_ids.size(), 0);
  parallel_for(gaussian_ids.size(), cfg.workers, [&](std::size_t g) {
    const std::size_t id = gaussian_ids[g];
    const auto inst = make_sparsify_instance(cfg.seed, id);
    try {
      sparsify(inst.t, inst.y, {inst.delta, 1.0, cfg.max_draws, derive_seed(cfg.seed, {0x31, id})});
    } catch (const SparsifySearchFailure&) {
      ref_failed[g] = 1;
    }
  });
  const auto ref_failures = static_cast<double>(std::count(ref_failed.begin(), ref_failed.end(), 1));
  rep.notes.push_back("search_failure_rate=" + fmt_double(st.failure_rate()));
  if (!gaussian_ids.empty()) {
    rep.notes.push_back("gaussian_failure_rate_C_K_1=" +
                        fmt_double(ref_failures / static_cast<double>(gaussian_ids.size())));
  }
  rep.notes.push_back("max_measured_ratio=" + fmt_double(st.max_ratio));
  rep.notes.push_back("cases big/max-entry/randomized=" + std::to_string(st.per_case[0]) + "/" +
                      std::to_string(st.per_case[1]) + "/" + std::to_string(st.per_case[2]));
  if (st.rank_violations > 0) rep.fail("rank bound violated");
  if (st.case_violations > 0) rep.fail("certificate case invariant violated");
  if (st.ratio_violations > 0) rep.fail("measured ratio above cap");
  if (st.failure_rate() >= 0.05) rep.fail("search failure rate " + fmt_double(st.failure_rate()) + " >= 5%");
  if (stats_out) *stats_out = st;
  return rep;
}

}  // namespace htcov
