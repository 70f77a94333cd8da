#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expcomp {

// Argument outside the mathematical domain of a function (e.g. ln_gamma(0)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Result not representable as a finite double.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Iterative routine exhausted its evaluation budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidBracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested moment order is at or beyond the Pareto tail index.
class InfiniteMomentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// No grid point produced a bracket-consistent profile estimate.
class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace expcomp
