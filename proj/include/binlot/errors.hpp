#pragma once

#include <stdexcept>

namespace binlot {

// Thrown when an exact enumeration would exceed the configured point cap.
// Exhaustive computations never degrade to sampling silently.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a bit stream runs dry before a draw resolves.
struct InsufficientRandomness : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace binlot
