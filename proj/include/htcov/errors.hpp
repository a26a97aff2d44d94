#pragma once

#include <stdexcept>
#include <string>

namespace htcov {

/// Invalid input parameters (maps to CLI exit code 2).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A caller-side contract was broken (e.g. non-symmetric input to a symmetric routine).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Requested moment does not exist for the distribution family.
class InfiniteMomentError : public ParameterError {
 public:
  explicit InfiniteMomentError(const std::string& what) : ParameterError(what) {}
};

/// Data that a fit or estimator cannot use (nonpositive values, too few points).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative eigen-solver hit its iteration cap. Carries the best estimate seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, int iterations)
      : std::runtime_error(what), best_estimate_(best_estimate), iterations_(iterations) {}

  double best_estimate() const noexcept { return best_estimate_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_estimate_;
  int iterations_;
};

}  // namespace htcov
