#pragma once

// k-max order statistics and the closed-form tail bounds applied to them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "htcov/distributions.hpp"
#include "htcov/errors.hpp"
#include "htcov/io.hpp"
#include "htcov/parallel.hpp"
#include "htcov/report.hpp"
#include "htcov/rng.hpp"

namespace htcov {

namespace detail {

/// k-th largest (1-based) of `pool`, which is consumed. Partial selection above 64 entries.
inline double kth_largest(std::vector<double>& pool, std::size_t k) {
  if (k > pool.size()) return 0.0;
  if (pool.size() > 64) {
    std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k - 1), pool.end(),
                     std::greater<>());
  } else {
    std::sort(pool.begin(), pool.end(), std::greater<>());
  }
  return pool[k - 1];
}

}  // namespace detail

/// k-th largest element of (values_i)_{i in J}, multiset semantics; 0 when k > |J|.
inline double kmax(std::span<const double> values, std::span<const std::size_t> subset, std::size_t k) {
  if (k < 1) throw ParameterError("kmax needs k >= 1");
  std::vector<double> pool;
  pool.reserve(subset.size());
  for (std::size_t i : subset) {
    if (i >= values.size()) throw ParameterError("kmax index out of range");
    pool.push_back(values[i]);
  }
  return detail::kth_largest(pool, k);
}

/// kmax over the whole sequence.
inline double kmax(std::span<const double> values, std::size_t k) {
  if (k < 1) throw ParameterError("kmax needs k >= 1");
  std::vector<double> pool(values.begin(), values.end());
  return detail::kth_largest(pool, k);
}

/// P{kmax_m(xi_1..xi_r) >= tau} <= (e B r / (tau^h m))^m for independent
/// nonnegative xi_i with E xi_i^h <= B.
inline Bound order_stat_tail_bound(double B, double h, long r, long m, double tau) {
  if (!(h >= 1.0) || !(B >= 1.0) || m < 1 || m > r || !(tau > 0.0)) {
    throw ParameterError("order_stat_tail_bound needs h >= 1, B >= 1, 1 <= m <= r, tau > 0");
  }
  const double base = std::numbers::e * B * static_cast<double>(r) / (std::pow(tau, h) * static_cast<double>(m));
  return Bound::of(std::pow(base, static_cast<double>(m)));
}

/// P{||X|| >= tau} <= B n^{p/2} tau^{-p} for isotropic X with projection moments bounded by B.
inline Bound norm_tail_bound(double B, double p, long n, double tau) {
  if (!(p > 2.0) || !(B >= 1.0) || n < 1 || !(tau > 0.0)) {
    throw ParameterError("norm_tail_bound needs p > 2, B >= 1, n >= 1, tau > 0");
  }
  return Bound::of(B * std::pow(static_cast<double>(n), p / 2.0) * std::pow(tau, -p));
}

/// Euclidean norm of `values` after removing its n largest entries.
inline double tail_l2_norm(std::span<const double> values, std::size_t n) {
  if (n > values.size()) throw ParameterError("tail_l2_norm needs n <= N");
  for (double v : values) {
    if (v < 0.0) throw ContractError("tail_l2_norm needs nonnegative values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t i = n; i < sorted.size(); ++i) acc += sorted[i] * sorted[i];
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Monte Carlo validators

struct OrderStatsSuiteConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t trials = 10000;
  double C_cap = 32.0;
  std::size_t tail_trials = 200;
};

/// One-sided Pareto(alpha, 1) draw; E xi^h = alpha / (alpha - h) for h < alpha.
inline double pareto_draw(Engine& eng, double alpha) { return std::pow(uniform_open0(eng), -1.0 / alpha); }

/// Empirical P{kmax_m >= tau} for r i.i.d. Pareto variables vs the order-statistic bound.
inline SuiteReport validate_order_stat_bound(const OrderStatsSuiteConfig& cfg) {
  SuiteReport rep{"order-stats/kmax-tail", "params,bound,empirical,violation_flag"};
  const double alpha = 3.0;
  const double h = 2.0;
  const double B = alpha / (alpha - h);
  const long r = 20;
  struct Cell {
    long m;
    double tau;
  };
  std::vector<Cell> cells;
  for (long m : {1L, 2L, 3L, 5L, 8L}) {
    for (double tau : {2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 40.0}) {
      if (order_stat_tail_bound(B, h, r, m, tau).clamped <= 0.9) cells.push_back({m, tau});
    }
  }
  std::vector<double> freq(cells.size());
  parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
    Engine eng = make_engine(derive_seed(cfg.seed, {0x05, c}));
    std::vector<double> xs(static_cast<std::size_t>(r));
    std::size_t hits = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      for (auto& x : xs) x = pareto_draw(eng, alpha);
      if (kmax(xs, static_cast<std::size_t>(cells[c].m)) >= cells[c].tau) ++hits;
    }
    freq[c] = static_cast<double>(hits) / static_cast<double>(cfg.trials);
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double bound = order_stat_tail_bound(B, h, r, cells[c].m, cells[c].tau).clamped;
    const bool violated = freq[c] > bound + binomial_slack(bound, cfg.trials);
    rep.rows.push_back(csv_join({"alpha=3;h=2;B=3;r=20;m=" + std::to_string(cells[c].m) + ";tau=" +
                                     fmt_double(cells[c].tau),
                                 fmt_double(bound), fmt_double(freq[c]), violated ? "1" : "0"}));
    if (violated) rep.fail("kmax tail bound violated at m=" + std::to_string(cells[c].m));
  }
  return rep;
}

/// Empirical P{||X|| >= tau} vs B n^{p/2} tau^{-p}, with B from moment_bound.
inline SuiteReport validate_norm_tail_bound(const OrderStatsSuiteConfig& cfg) {
  SuiteReport rep{"order-stats/norm-tail", "params,bound,empirical,violation_flag"};
  struct Case {
    DistributionSpec spec;
    double p;
  };
  MomentSweepOptions sweep;
  sweep.samples = 20000;
  sweep.random_directions = 200;
  sweep.seed = derive_seed(cfg.seed, {0x06});
  const std::vector<Case> cases{{DistributionSpec::gaussian(10), 4.0},
                                {DistributionSpec::coordinate_discrete(9), 3.0},
                                {DistributionSpec::pareto(10, 6.0), 4.0},
                                {DistributionSpec::student_t(6, 5.0), 3.0}};
  const std::size_t draws = cfg.trials;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c];
    const MomentProfile prof = moment_bound(cs.spec, cs.p, sweep);
    const SampleMatrix x = sample_matrix(cs.spec, draws, derive_seed(cfg.seed, {0x07, c}));
    const Eigen::VectorXd norms = x.rows.rowwise().norm();
    const auto nn = static_cast<long>(cs.spec.n);
    for (double mult : {1.0, 1.25, 1.5, 2.0, 3.0}) {
      const double tau = mult * std::sqrt(static_cast<double>(nn)) * std::pow(prof.B, 1.0 / cs.p);
      const double bound = norm_tail_bound(prof.B, cs.p, nn, tau).clamped;
      if (bound > 0.9) continue;
      const double freq = static_cast<double>((norms.array() >= tau).count()) / static_cast<double>(draws);
      const bool violated = freq > bound + binomial_slack(bound, draws);
      rep.rows.push_back(csv_join({std::string(family_name(cs.spec.family)) + ";n=" + std::to_string(nn) +
                                       ";p=" + fmt_double(cs.p) + ";B=" + fmt_double(prof.B) + ";tau=" +
                                       fmt_double(tau),
                                   fmt_double(bound), fmt_double(freq), violated ? "1" : "0"}));
      if (violated) rep.fail("norm tail bound violated for " + std::string(family_name(cs.spec.family)));
    }
  }
  return rep;
}

/// Measured constant of the tail l2-norm estimate: ratio of
/// (sum_{i>n} kmax_i(Y)^2)^{1/2} to B^{1/q} sqrt(n) (N/n)^{1/min(q,2)}.
inline SuiteReport validate_tail_l2_constant(const OrderStatsSuiteConfig& cfg) {
  SuiteReport rep{"order-stats/tail-l2", "params,bound,empirical,violation_flag"};
  struct Cell {
    double q;
    std::size_t N;
    std::size_t n;
  };
  std::vector<Cell> cells;
  for (double q : {1.5, 2.5, 4.0}) {
    for (std::size_t N : {1000u, 10000u}) {
      for (std::size_t n : {10u, 100u}) cells.push_back({q, N, n});
    }
  }
  std::vector<double> worst(cells.size());
  parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
    const auto& cell = cells[c];
    const double alpha = cell.q + 1.0;
    const double B = alpha / (alpha - cell.q);
    const double scale = std::pow(B, 1.0 / cell.q) * std::sqrt(static_cast<double>(cell.n)) *
                         std::pow(static_cast<double>(cell.N) / static_cast<double>(cell.n),
                                  1.0 / std::min(cell.q, 2.0));
    Engine eng = make_engine(derive_seed(cfg.seed, {0x08, c}));
    std::vector<double> ys(cell.N);
    double w = 0.0;
    for (std::size_t t = 0; t < cfg.tail_trials; ++t) {
      for (auto& y : ys) y = pareto_draw(eng, alpha);
      w = std::max(w, tail_l2_norm(ys, cell.n) / scale);
    }
    worst[c] = w;
  });
  double overall = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    overall = std::max(overall, worst[c]);
    const bool violated = worst[c] > cfg.C_cap;
    rep.rows.push_back(csv_join({"q=" + fmt_double(cells[c].q) + ";N=" + std::to_string(cells[c].N) +
                                     ";n=" + std::to_string(cells[c].n),
                                 fmt_double(cfg.C_cap), fmt_double(worst[c]), violated ? "1" : "0"}));
    if (violated) rep.fail("tail l2 measured constant above cap");
  }
  rep.notes.push_back("measured_constant=" + fmt_double(overall));
  return rep;
}

inline SuiteReport run_order_stats_suite(const OrderStatsSuiteConfig& cfg) {
  SuiteReport all{"order-stats", "suite,params,bound,empirical,violation_flag"};
  for (const auto& part : {validate_order_stat_bound(cfg), validate_norm_tail_bound(cfg), validate_tail_l2_constant(cfg)}) {
    for (const auto& row : part.rows) all.rows.push_back(part.name + "," + row);
    for (const auto& n : part.notes) all.notes.push_back(part.name + ": " + n);
    all.pass = all.pass && part.pass;
  }
  return all;
}

}  // namespace htcov
