#pragma once

#include <stdexcept>
#include <string>

namespace mch {

/// Invalid parameters or configuration (maps to CLI exit code 2).
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: non-convergence, positivity loss, blow-up (CLI exit code 3).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mch
