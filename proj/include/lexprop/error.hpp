#pragma once

#include <stdexcept>
#include <string>

namespace lexprop {

// Bad arguments or configuration values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, vocabularies, seeds).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace lexprop
