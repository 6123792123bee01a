#pragma once

#include <stdexcept>
#include <string>

namespace gin {

// Bad or inconsistent input data (files, ids, labels). CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure (non-finite values, non-convergence). CLI exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gin
