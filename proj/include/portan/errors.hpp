#pragma once

#include <stdexcept>
#include <string>

namespace portan {

// Bad window bounds, malformed config, unusable parameter combinations.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A stated operation precondition does not hold for the given inputs.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A domain-type invariant would be violated (negative scalar, ratio outside
// (0,1), non-decreasing tail, ...).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration cap was exhausted before the query could be answered.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace portan
