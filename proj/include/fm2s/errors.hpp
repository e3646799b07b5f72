#pragma once

#include <stdexcept>
#include <string>

namespace fm2s {

// File or format problem. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Broken precondition, shape mismatch, or bad configuration.
// The CLI maps these to exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Training produced a non-finite loss. Carries the global optimizer
// step index for the diagnostic. The CLI maps these to exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long long step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

}  // namespace fm2s
