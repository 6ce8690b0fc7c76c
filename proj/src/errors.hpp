// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace beamnull {

// Inconsistent or out-of-range configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Valid request outside what this implementation covers.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation on an empty collection.
struct EmptySetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A pattern cut never drops 3 dB below its peak.
struct NoCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace beamnull
