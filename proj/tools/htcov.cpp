// Command-line front end: sampling, scaling experiments and verification suites.
//
// Exit codes: 0 pass, 1 assertion failure or runtime error, 2 parameter error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "htcov/htcov.hpp"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned workers = 0;
  std::string format = "csv";
};

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("HTCOV_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t pos = 0;
    const auto s = std::stoull(v, &pos);
    if (v[pos] != '\0') throw std::invalid_argument("trailing characters");
    return s;
  } catch (const std::exception&) {
    throw htcov::ParameterError(std::string("HTCOV_SEED is not an unsigned integer: ") + v);
  }
}

htcov::ExperimentConfig load_config(const Common& c) {
  htcov::ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw htcov::ParameterError("cannot open config " + c.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw htcov::ParameterError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = j.get<htcov::ExperimentConfig>();
  }
  if (c.seed) {
    cfg.master_seed = *c.seed;
  } else if (auto s = env_seed(); s && c.config_path.empty()) {
    cfg.master_seed = *s;
  }
  if (c.workers > 0) cfg.workers = c.workers;
  if (!c.out.empty()) cfg.out_path = c.out;
  return cfg;
}

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (auto s = env_seed()) return *s;
  return 1;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw htcov::ParameterError("cannot open output " + path);
  out << text;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON experiment configuration");
  cmd->add_option("--seed", c.seed, "master seed (falls back to HTCOV_SEED)");
  cmd->add_option("--out", c.out, "output file (default stdout)");
  cmd->add_option("--workers", c.workers, "worker threads");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

std::string report_text(const htcov::SuiteReport& rep, const std::string& format) {
  if (format == "csv") return rep.csv();
  nlohmann::json j{{"suite", rep.name}, {"header", rep.csv_header}, {"rows", rep.rows}, {"notes", rep.notes},
                   {"pass", rep.pass}};
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed sample covariance laboratory"};
  app.require_subcommand(1);

  Common common;

  auto* sample = app.add_subcommand("sample", "draw a sample matrix");
  add_common(sample, common);
  std::string family = "gaussian";
  std::size_t n = 4, N = 8;
  double alpha = 3.0, t0 = 1.0, nu = 3.0;
  sample->add_option("--family", family, "distribution family");
  sample->add_option("--n", n, "dimension");
  sample->add_option("--N", N, "number of samples");
  sample->add_option("--alpha", alpha, "tail index (pareto families)");
  sample->add_option("--t0", t0, "pareto cutoff");
  sample->add_option("--nu", nu, "student-t degrees of freedom");

  auto* scaling = app.add_subcommand("scaling", "deviation scaling experiment");
  add_common(scaling, common);

  auto* square = app.add_subcommand("square-norm", "square-matrix norm ratio experiment");
  add_common(square, common);

  auto* general = app.add_subcommand("general-cov", "general covariance experiment");
  add_common(general, common);
  std::optional<double> condition;
  general->add_option("--condition", condition, "use a random SPD Sigma with this condition number");

  auto* coloring = app.add_subcommand("coloring", "threshold-graph coloring experiment");
  add_common(coloring, common);
  std::size_t coloring_trials = 1000;
  coloring->add_option("--trials", coloring_trials, "trials per grid point");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, common);
  std::string suite;
  verify->add_option("suite", suite, "nets|quadforms|recursion|coloring|sparsify|concentration|order-stats")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) {
      htcov::DistributionSpec spec;
      spec.family = htcov::parse_family(family);
      spec.n = n;
      spec.alpha = alpha;
      spec.t0 = t0;
      spec.nu = nu;
      if (!common.config_path.empty()) spec = load_config(common).dist;
      const auto a = htcov::sample_matrix(spec, spec.n, N, resolve_seed(common));
      if (common.format == "json") {
        nlohmann::json j{{"spec", a.spec}, {"seed", a.seed}, {"rows", nlohmann::json::array()}};
        for (Eigen::Index i = 0; i < a.rows.rows(); ++i) {
          std::vector<double> row(a.rows.row(i).begin(), a.rows.row(i).end());
          j["rows"].push_back(row);
        }
        emit(common.out, j.dump(2) + "\n");
      } else {
        std::string text;
        for (Eigen::Index i = 0; i < a.rows.rows(); ++i) {
          std::vector<std::string> cells;
          for (Eigen::Index k = 0; k < a.rows.cols(); ++k) cells.push_back(htcov::fmt_double(a.rows(i, k)));
          text += htcov::csv_join(cells) + "\n";
        }
        emit(common.out, text);
      }
      return 0;
    }
    if (scaling->parsed() || general->parsed()) {
      auto cfg = load_config(common);
      htcov::ScalingResult res;
      if (scaling->parsed()) {
        res = htcov::run_scaling(cfg);
      } else {
        const auto dim = static_cast<Eigen::Index>(cfg.n_values.front());
        htcov::Matrix sigma = htcov::Matrix::Identity(dim, dim);
        if (condition) {
          sigma = htcov::random_spd(cfg.n_values.front(), *condition, htcov::derive_seed(cfg.master_seed, {0x61}));
        } else if (cfg.sigma) {
          sigma = *cfg.sigma;
        }
        res = htcov::run_general_covariance(cfg, sigma);
      }
      emit(cfg.out_path, common.format == "json" ? res.json().dump(2) + "\n" : res.csv());
      return res.pass ? 0 : 1;
    }
    if (square->parsed()) {
      const auto cfg = load_config(common);
      const auto res = htcov::run_square_norm(cfg);
      emit(cfg.out_path, common.format == "json" ? res.json().dump(2) + "\n" : res.csv());
      return res.pass ? 0 : 1;
    }
    if (coloring->parsed()) {
      htcov::ColoringSuiteConfig cfg;
      cfg.seed = resolve_seed(common);
      if (common.workers > 0) cfg.workers = common.workers;
      cfg.trials = coloring_trials;
      const auto rep = htcov::run_coloring_suite(cfg);
      emit(common.out, report_text(rep, common.format));
      return rep.pass ? 0 : 1;
    }
    if (verify->parsed()) {
      htcov::VerifyConfig cfg;
      cfg.seed = resolve_seed(common);
      if (common.workers > 0) cfg.workers = common.workers;
      const auto rep = htcov::run_verification_suite(suite, cfg);
      emit(common.out, report_text(rep, common.format));
      std::cerr << rep.name << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
      return rep.pass ? 0 : 1;
    }
  } catch (const htcov::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
