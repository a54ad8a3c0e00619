#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracvolt {

/// Refinement history of an iterated or improper integral: (level, partial value).
using RefinementTrace = std::vector<std::pair<int, double>>;

/// A quadrature that failed to reach its tolerance. Carries the last partial
/// value and the refinement history so callers can report it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double partial, RefinementTrace trace = {})
      : std::runtime_error(what), partial_(partial), trace_(std::move(trace)) {}
  double partial() const noexcept { return partial_; }
  const RefinementTrace& trace() const noexcept { return trace_; }

 private:
  double partial_;
  RefinementTrace trace_;
};

/// A hypothesis of a theorem or operation is not met. `flag()` names it.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string flag, const std::string& what)
      : std::invalid_argument(what), flag_(std::move(flag)) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

/// A fractional derivative factor of a pathwise integral is not finite.
class DivergentDerivativeError : public std::runtime_error {
 public:
  DivergentDerivativeError(std::string factor, double norm, const std::string& what)
      : std::runtime_error(what), factor_(std::move(factor)), norm_(norm) {}
  const std::string& factor() const noexcept { return factor_; }
  double norm() const noexcept { return norm_; }

 private:
  std::string factor_;
  double norm_;
};

}  // namespace fracvolt
