#pragma once

// Threshold graph on sample indices and the first-fit coloring process that
// splits the sample into classes of almost-orthogonal vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "htcov/distributions.hpp"
#include "htcov/errors.hpp"
#include "htcov/io.hpp"
#include "htcov/matrix_core.hpp"
#include "htcov/parallel.hpp"
#include "htcov/report.hpp"

namespace htcov {

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Edges (i, j), i < j, with |<X_i, X_j>| > H max_h ||X_h||.
struct ThresholdGraph {
  std::size_t N = 0;
  double H = 0.0;
  double max_norm = 0.0;
  std::vector<IndexPair> edges;

  bool adjacent(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), IndexPair{i, j});
  }
};

inline ThresholdGraph build_graph(const GramMatrix& g, double H) {
  if (!(H > 0.0)) throw ParameterError("threshold H must be positive");
  ThresholdGraph graph;
  graph.N = static_cast<std::size_t>(g.size());
  graph.H = H;
  for (Eigen::Index i = 0; i < g.size(); ++i) graph.max_norm = std::max(graph.max_norm, g.norm(i));
  const double cut = H * graph.max_norm;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    for (Eigen::Index j = i + 1; j < g.size(); ++j) {
      if (std::abs(g(i, j)) > cut) graph.edges.emplace_back(i, j);
    }
  }
  return graph;
}

/// Color classes C_1, C_2, ... (0-based sample indices) and the per-index color Y(i) >= 1.
struct ColoringPartition {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<int> colors;
  double H = 0.0;

  std::size_t color_count() const {
    return static_cast<std::size_t>(
        std::count_if(classes.begin(), classes.end(), [](const auto& c) { return !c.empty(); }));
  }
};

/// First-fit process in sample order: Y(1) = 1 and Y(i) is the least color r
/// such that |<X_i, X_j>| <= H ||X_j|| for every earlier j of color r.
inline ColoringPartition greedy_color(const GramMatrix& g, double H) {
  if (!(H > 0.0)) throw ParameterError("threshold H must be positive");
  ColoringPartition part;
  part.H = H;
  const auto N = static_cast<std::size_t>(g.size());
  part.colors.assign(N, 0);
  std::vector<double> cut(N);
  for (std::size_t j = 0; j < N; ++j) cut[j] = H * g.norm(static_cast<Eigen::Index>(j));

  for (std::size_t i = 0; i < N; ++i) {
    std::size_t r = 0;
    for (; r < part.classes.size(); ++r) {
      const auto& members = part.classes[r];
      const bool fits = std::all_of(members.begin(), members.end(), [&](std::size_t j) {
        return std::abs(g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) <= cut[j];
      });
      if (fits) break;
    }
    if (r == part.classes.size()) part.classes.emplace_back();
    part.classes[r].push_back(i);
    part.colors[i] = static_cast<int>(r + 1);
  }
  return part;
}

struct ColoringValidation {
  bool valid = true;
  /// Within-class pairs whose inner product exceeds H max_h ||X_h||.
  std::vector<IndexPair> violations;
  std::vector<std::string> problems;
};

/// Checks that the classes partition [N] and no class contains an edge of G_H.
inline ColoringValidation validate_coloring(const GramMatrix& g, double H, const ColoringPartition& part) {
  ColoringValidation out;
  const auto N = static_cast<std::size_t>(g.size());
  std::vector<int> seen(N, 0);
  for (const auto& cls : part.classes) {
    for (std::size_t i : cls) {
      if (i >= N) {
        out.problems.push_back("index " + std::to_string(i) + " out of range");
        continue;
      }
      ++seen[i];
    }
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (seen[i] != 1) out.problems.push_back("index " + std::to_string(i) + " covered " + std::to_string(seen[i]) + " times");
  }
  double max_norm = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) max_norm = std::max(max_norm, g.norm(i));
  const double cut = H * max_norm;
  for (const auto& cls : part.classes) {
    for (std::size_t a = 0; a < cls.size(); ++a) {
      for (std::size_t b = a + 1; b < cls.size(); ++b) {
        const std::size_t i = std::min(cls[a], cls[b]);
        const std::size_t j = std::max(cls[a], cls[b]);
        if (j < N && std::abs(g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > cut) {
          out.violations.emplace_back(i, j);
        }
      }
    }
  }
  out.valid = out.problems.empty() && out.violations.empty();
  return out;
}

/// (B N H^{-p})^m n^{p/2}: tail bound for chi(G_H) > m.
inline Bound chromatic_tail_bound(double B, long N, double H, double p, long n, long m) {
  if (m < 2) throw ParameterError("chromatic_tail_bound needs an integer m > 1");
  if (!(H > 0.0) || !(p > 2.0) || !(B >= 1.0) || N < 1 || n < 1) {
    throw ParameterError("chromatic_tail_bound needs H > 0, p > 2, B >= 1, N, n >= 1");
  }
  const double base = B * static_cast<double>(N) * std::pow(H, -p);
  return Bound::of(std::pow(base, static_cast<double>(m)) * std::pow(static_cast<double>(n), p / 2.0));
}

/// H = (B N)^{1/p} n^{1/2 - 1/p} / ln n.
inline double default_threshold(double B, long N, long n, double p) {
  if (n < 2) throw ParameterError("default_threshold needs n >= 2");
  if (!(p > 2.0) || N < 1 || !(B > 0.0)) throw ParameterError("default_threshold needs p > 2, N >= 1, B > 0");
  return std::pow(B * static_cast<double>(N), 1.0 / p) * std::pow(static_cast<double>(n), 0.5 - 1.0 / p) /
         std::log(static_cast<double>(n));
}

/// Exact chromatic number by backtracking; cross-check oracle for N <= 12.
inline std::size_t exact_chromatic_number(const ThresholdGraph& graph) {
  if (graph.N > 12) throw ParameterError("exact_chromatic_number is limited to N <= 12");
  if (graph.N == 0) return 0;
  std::vector<std::vector<bool>> adj(graph.N, std::vector<bool>(graph.N, false));
  for (auto [i, j] : graph.edges) adj[i][j] = adj[j][i] = true;
  std::vector<int> color(graph.N, -1);
  std::function<bool(std::size_t, int)> place = [&](std::size_t v, int k) -> bool {
    if (v == graph.N) return true;
    for (int c = 0; c < k; ++c) {
      bool ok = true;
      for (std::size_t u = 0; u < v && ok; ++u) ok = !(adj[v][u] && color[u] == c);
      if (!ok) continue;
      color[v] = c;
      if (place(v + 1, k)) return true;
    }
    color[v] = -1;
    return false;
  };
  for (int k = 1;; ++k) {
    if (place(0, k)) return static_cast<std::size_t>(k);
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo check of the chromatic tail bound

struct ColoringSuiteConfig {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t trials = 1000;
  double p = 4.0;
  std::vector<std::size_t> n_values{4, 9, 16};
  std::vector<std::size_t> N_values{8, 32, 128};
  std::vector<double> H_multipliers{0.5, 1.0, 2.0, 4.0};  // times sqrt(n)
  std::vector<long> m_values{2, 3};
};

/// Coordinate-discrete samples (analytic B = n^{p/2-1}): exceedance frequency of
/// the greedy color count over m vs the chromatic tail bound, and greedy
/// validity on every trial. Additional heavy-tailed families are checked for
/// validity and H-monotonicity only.
inline SuiteReport run_coloring_suite(const ColoringSuiteConfig& cfg) {
  SuiteReport rep{"coloring", "n,N,p,H,trial,color_count,bound_m,bound_value,exceeded_flag"};
  struct Cell {
    std::size_t n, N;
    double H;
  };
  std::vector<Cell> cells;
  for (auto n : cfg.n_values)
    for (auto N : cfg.N_values)
      for (double mult : cfg.H_multipliers) cells.push_back({n, N, mult * std::sqrt(static_cast<double>(n))});

  struct CellResult {
    std::vector<std::size_t> counts;
    std::size_t invalid = 0;
  };
  std::vector<CellResult> results(cells.size());
  // Trials within a cell are cheap; parallelize over cells and keep trial order.
  parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
    const auto& cell = cells[c];
    auto& res = results[c];
    res.counts.resize(cfg.trials);
    const auto spec = DistributionSpec::coordinate_discrete(cell.n);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const auto a = sample_matrix(spec, cell.n, cell.N, derive_seed(cfg.seed, {0x20, c, t}));
      const auto g = gram(a);
      const auto part = greedy_color(g, cell.H);
      if (!validate_coloring(g, cell.H, part).valid) ++res.invalid;
      res.counts[t] = part.color_count();
    }
  });

  std::size_t total_invalid = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    total_invalid += results[c].invalid;
    const double B = std::pow(static_cast<double>(cell.n), cfg.p / 2.0 - 1.0);
    for (long m : cfg.m_values) {
      const Bound b = chromatic_tail_bound(B, static_cast<long>(cell.N), cell.H, cfg.p, static_cast<long>(cell.n), m);
      if (b.clamped > 0.9) continue;
      std::size_t exceeded = 0;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const bool ex = results[c].counts[t] > static_cast<std::size_t>(m);
        exceeded += ex;
        rep.rows.push_back(csv_join({std::to_string(cell.n), std::to_string(cell.N), fmt_double(cfg.p),
                                     fmt_double(cell.H), std::to_string(t), std::to_string(results[c].counts[t]),
                                     std::to_string(m), fmt_double(b.clamped), ex ? "1" : "0"}));
      }
      const double freq = static_cast<double>(exceeded) / static_cast<double>(cfg.trials);
      if (freq > b.clamped + binomial_slack(b.clamped, cfg.trials)) {
        rep.fail("exceedance " + fmt_double(freq) + " above bound " + fmt_double(b.clamped) + " at n=" +
                 std::to_string(cell.n) + " N=" + std::to_string(cell.N) + " H=" + fmt_double(cell.H) +
                 " m=" + std::to_string(m));
      }
    }
  }

  // Validity and monotonicity in H on heavy-tailed samples.
  const std::vector<DistributionSpec> families{DistributionSpec::gaussian(10), DistributionSpec::pareto(10, 3.0),
                                               DistributionSpec::student_t(10, 3.0),
                                               DistributionSpec::spherical_pareto(10, 2.5)};
  const std::vector<double> hs{0.25, 0.5, 1.0, 2.0, 4.0};
  std::size_t monotone_breaks = 0;
  for (std::size_t f = 0; f < families.size(); ++f) {
    for (std::size_t t = 0; t < 20; ++t) {
      const auto a = sample_matrix(families[f], 10, 200, derive_seed(cfg.seed, {0x21, f, t}));
      const auto g = gram(a);
      std::size_t prev = a.rows.rows() + 1;
      for (double h : hs) {
        const auto part = greedy_color(g, h);
        if (!validate_coloring(g, h, part).valid) ++total_invalid;
        if (part.color_count() > prev) ++monotone_breaks;
        prev = part.color_count();
      }
    }
  }
  rep.notes.push_back("validity_violations=" + std::to_string(total_invalid));
  rep.notes.push_back("monotonicity_breaks=" + std::to_string(monotone_breaks));
  if (total_invalid > 0) rep.fail("greedy coloring produced invalid partitions");
  return rep;
}

}  // namespace htcov
