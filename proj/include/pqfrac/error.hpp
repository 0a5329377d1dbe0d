/// @file error.hpp
/// @brief Exception types thrown by the pqfrac library.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pqfrac {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One failed hypothesis: the offending field and the condition it violates.
struct Violation {
  std::string field;
  std::string condition;
};

/// Raised by validate() with every violated hypothesis at once.
class HypothesisViolation : public Error {
 public:
  explicit HypothesisViolation(std::vector<Violation> v)
      : Error(format(v)), violations_(std::move(v)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string format(const std::vector<Violation>& v) {
    std::string msg = "hypothesis violation:";
    for (const auto& item : v) msg += " [" + item.field + ": " + item.condition + "]";
    return msg;
  }
  std::vector<Violation> violations_;
};

class DegenerateGrid : public Error {
 public:
  using Error::Error;
};

class NonFiniteField : public Error {
 public:
  using Error::Error;
};

class UnknownExpression : public Error {
 public:
  using Error::Error;
};

class BoundaryViolation : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iters, double residual, double eps = 0.0)
      : Error(what), iters_(iters), residual_(residual), eps_(eps) {}
  int iterations() const noexcept { return iters_; }
  double last_residual() const noexcept { return residual_; }
  double eps() const noexcept { return eps_; }

 private:
  int iters_;
  double residual_;
  double eps_;
};

class LineSearchStall : public Error {
 public:
  using Error::Error;
};

class RootBracketFailure : public Error {
 public:
  using Error::Error;
};

class EmptyShiftSet : public Error {
 public:
  using Error::Error;
};

class OrderOutOfRange : public Error {
 public:
  using Error::Error;
};

class NotASolution : public Error {
 public:
  using Error::Error;
};

class InapplicableTheorem : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pqfrac
