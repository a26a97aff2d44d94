#pragma once

// Hoeffding and Kesten inequality evaluators and the empirical Levy
// concentration function.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "htcov/errors.hpp"
#include "htcov/io.hpp"
#include "htcov/parallel.hpp"
#include "htcov/report.hpp"
#include "htcov/rng.hpp"

namespace htcov {

struct Range {
  double lo;
  double hi;
};

/// exp(-2 m^2 t^2 / sum (b_i - a_i)^2): tail of sum xi_i - sum E xi_i >= m t.
/// Returns 0 for t > 0 when every range is degenerate.
inline double hoeffding_bound(std::span<const Range> ranges, double t) {
  if (ranges.empty()) throw ParameterError("hoeffding_bound needs at least one range");
  if (!(t > 0.0)) throw ParameterError("hoeffding_bound needs t > 0");
  double width_sq = 0.0;
  for (const auto& r : ranges) {
    if (r.hi < r.lo) throw ParameterError("hoeffding_bound needs b_i >= a_i");
    width_sq += (r.hi - r.lo) * (r.hi - r.lo);
  }
  if (width_sq == 0.0) return 0.0;
  const auto m = static_cast<double>(ranges.size());
  return std::exp(-2.0 * m * m * t * t / width_sq);
}

struct ConcentrationEstimate {
  double t = 0.0;
  double q_hat = 0.0;
  std::size_t sample_count = 0;
};

/// Empirical Levy concentration sup_lambda P{|xi - lambda| <= t}. Exact for the
/// empirical measure: an optimal window [lambda - t, lambda + t] can always be
/// slid right until its left end meets a sample.
inline ConcentrationEstimate levy_concentration(std::span<const double> samples, double t) {
  if (samples.empty()) throw ParameterError("levy_concentration needs samples");
  if (!(t >= 0.0)) throw ParameterError("levy_concentration needs t >= 0");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  std::size_t best = 0;
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < s.size(); ++lo) {
    hi = std::max(hi, lo);
    while (hi < s.size() && s[hi] - s[lo] <= 2.0 * t) ++hi;
    best = std::max(best, hi - lo);
  }
  return {t, static_cast<double>(best) / static_cast<double>(s.size()), s.size()};
}

/// C_K R sum a_j^2 (1 - Q(xi_j, a_j)) Q(xi_j, R) / (sum a_j^2 (1 - Q(xi_j, a_j)))^{3/2}.
inline double kesten_bound(std::span<const double> a, double R, std::span<const double> q_at_a,
                           std::span<const double> q_at_R, double C_K) {
  if (a.empty() || a.size() != q_at_a.size() || a.size() != q_at_R.size()) {
    throw ParameterError("kesten_bound needs equally sized, nonempty inputs");
  }
  if (!(C_K > 0.0) || !(R > 0.0)) throw ParameterError("kesten_bound needs C_K > 0 and R > 0");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!(a[j] > 0.0) || a[j] > 2.0 * R) throw ParameterError("kesten_bound needs 0 < a_j <= 2R");
    if (q_at_a[j] < 0.0 || q_at_a[j] > 1.0 || q_at_R[j] < 0.0 || q_at_R[j] > 1.0) {
      throw ParameterError("kesten_bound concentration values must lie in [0, 1]");
    }
    const double w = a[j] * a[j] * (1.0 - q_at_a[j]);
    num += w * q_at_R[j];
    den += w;
  }
  if (den == 0.0) throw DataError("kesten_bound: every summand is fully concentrated at its a_j");
  return C_K * R * num / std::pow(den, 1.5);
}

// ---------------------------------------------------------------------------
// Monte Carlo validators

struct ConcentrationSuiteConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t trials = 10000;
  double C_K = 8.0;
};

/// Sums of m = 30 uniforms against the Hoeffding bound on a grid of t where the
/// bound lies in [0.01, 0.9].
inline SuiteReport validate_hoeffding(const ConcentrationSuiteConfig& cfg) {
  SuiteReport rep{"concentration/hoeffding", "suite,params,bound,empirical,min_sufficient_constant"};
  constexpr std::size_t m = 30;
  const std::vector<Range> ranges(m, Range{0.0, 1.0});
  std::vector<double> ts;
  for (double t = 0.02; t <= 0.3; t += 0.02) {
    const double b = hoeffding_bound(ranges, t);
    if (b >= 0.01 && b <= 0.9) ts.push_back(t);
  }
  std::vector<double> sums(cfg.trials);
  Engine eng = make_engine(derive_seed(cfg.seed, {0x10}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (auto& s : sums) {
    s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += unif(eng);
  }
  for (double t : ts) {
    const double bound = hoeffding_bound(ranges, t);
    const auto hits = std::count_if(sums.begin(), sums.end(), [&](double s) { return s - 0.5 * m >= m * t; });
    const double freq = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    rep.rows.push_back(csv_join({"hoeffding", "m=30;t=" + fmt_double(t), fmt_double(bound), fmt_double(freq),
                                 fmt_double(freq / bound)}));
    if (freq > bound + binomial_slack(bound, cfg.trials)) rep.fail("hoeffding bound violated at t=" + fmt_double(t));
  }
  return rep;
}

/// Q(sum eta_j c_j, R) for Bernoulli(1/2) eta_j and c_j = 1 against the Kesten
/// bound evaluated on empirical concentration inputs. Reports the smallest
/// constant that would have sufficed.
inline SuiteReport validate_kesten(const ConcentrationSuiteConfig& cfg) {
  SuiteReport rep{"concentration/kesten", "suite,params,bound,empirical,min_sufficient_constant"};
  const double R = 1.0;
  const double a_j = 0.4;
  const std::vector<std::size_t> sizes{25, 100, 400};
  std::vector<std::pair<double, double>> results(sizes.size());  // (bound at C_K = 1, empirical Q)
  parallel_for(sizes.size(), cfg.workers, [&](std::size_t c) {
    const std::size_t m = sizes[c];
    Engine eng = make_engine(derive_seed(cfg.seed, {0x11, c}));
    std::vector<std::vector<double>> terms(m, std::vector<double>(cfg.trials));
    std::vector<double> sums(cfg.trials, 0.0);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      for (std::size_t j = 0; j < m; ++j) {
        const double x = (eng() >> 63) ? 1.0 : 0.0;
        terms[j][t] = x;
        sums[t] += x;
      }
    }
    std::vector<double> a(m, a_j), qa(m), qr(m);
    for (std::size_t j = 0; j < m; ++j) {
      qa[j] = levy_concentration(terms[j], a_j).q_hat;
      qr[j] = levy_concentration(terms[j], R).q_hat;
    }
    results[c] = {kesten_bound(a, R, qa, qr, 1.0), levy_concentration(sums, R).q_hat};
  });
  double worst = 0.0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const auto [unit_bound, q] = results[c];
    const double bound = cfg.C_K * unit_bound;
    const double min_c = q / unit_bound;
    worst = std::max(worst, min_c);
    rep.rows.push_back(csv_join({"kesten", "m=" + std::to_string(sizes[c]) + ";R=1;a=0.4;C_K=" + fmt_double(cfg.C_K),
                                 fmt_double(bound), fmt_double(q), fmt_double(min_c)}));
    if (q > std::min(1.0, bound) + binomial_slack(std::min(1.0, bound), cfg.trials)) {
      rep.fail("kesten bound violated at m=" + std::to_string(sizes[c]));
    }
  }
  rep.notes.push_back("min_sufficient_C_K=" + fmt_double(worst));
  return rep;
}

inline SuiteReport run_concentration_suite(const ConcentrationSuiteConfig& cfg) {
  SuiteReport all{"concentration", "suite,params,bound,empirical,min_sufficient_constant"};
  for (const auto& part : {validate_hoeffding(cfg), validate_kesten(cfg)}) {
    all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
    for (const auto& n : part.notes) all.notes.push_back(part.name + ": " + n);
    all.pass = all.pass && part.pass;
  }
  return all;
}

}  // namespace htcov
