#pragma once

#include <stdexcept>
#include <string>

namespace kci {

// Bad arguments or violated preconditions. CLI maps this to exit code 1.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Runtime failures of the numerics (blow-up, lost brackets, non-convergence).
// CLI maps this to exit code 2.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw validation_error(msg);
}

}  // namespace kci
