#pragma once

#include <stdexcept>

namespace scootsense {

// Malformed or inconsistent input data. Mapped to CLI exit code 1.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or missing inputs. Mapped to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace scootsense
