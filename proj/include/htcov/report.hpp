#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace htcov {

/// Output of a verification suite: a CSV table plus a verdict.
struct SuiteReport {
  SuiteReport() = default;
  SuiteReport(std::string suite, std::string header) : name(std::move(suite)), csv_header(std::move(header)) {}

  std::string name;
  std::string csv_header;
  std::vector<std::string> rows;
  std::vector<std::string> notes;
  bool pass = true;

  void fail(std::string why) {
    pass = false;
    notes.push_back("FAIL: " + std::move(why));
  }

  std::string csv() const {
    std::string out = csv_header + "\n";
    for (const auto& r : rows) out += r + "\n";
    for (const auto& n : notes) out += "#" + n + "\n";
    return out;
  }
};

/// A probability bound reported both raw and clamped to [0, 1].
struct Bound {
  double raw = 0.0;
  double clamped = 0.0;

  static Bound of(double raw) { return {raw, std::clamp(raw, 0.0, 1.0)}; }
};

/// 3-sigma binomial slack for comparing an empirical frequency over `trials`
/// draws against probability bound `p`.
inline double binomial_slack(double p, std::size_t trials, double sigmas = 3.0) {
  return sigmas * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

}  // namespace htcov
