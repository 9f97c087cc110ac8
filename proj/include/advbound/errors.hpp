#pragma once

#include <stdexcept>
#include <string>

namespace advbound {

// Malformed or out-of-range input: bad documents, bad shapes, bad flags.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Bound computations are undefined for constant functions (F = 0).
class constant_function_error : public std::runtime_error {
 public:
  explicit constant_function_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A witness violates one of its defining constraints.  `constraint()` names
// the first violated constraint in a stable, machine-checkable form.
class witness_error : public std::runtime_error {
 public:
  witness_error(std::string constraint, const std::string& detail)
      : std::runtime_error(constraint + ": " + detail),
        constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

// Numerical failure: indefinite matrix handed to a PSD factorization,
// eigensolver not reaching the requested residual, and the like.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace advbound
