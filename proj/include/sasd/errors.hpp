#pragma once

#include <stdexcept>
#include <string>

namespace sasd {

// Shapes that cannot be combined (kernel longer than signal, mismatched maps, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke a precondition the operation relies on (e.g. a non-unit sphere point).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Inverse retraction between antipodal points.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backtracking or linesearch drove a stepsize below the underflow floor.
class StepsizeError : public std::runtime_error {
 public:
  StepsizeError(const std::string& what, int iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

// Unreadable or malformed user input. Position is a line number for text
// formats and a byte offset for binary ones.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t position = 0)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace sasd
