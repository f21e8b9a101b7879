#pragma once

#include <stdexcept>
#include <string>

namespace kvchase {

// A controller handed the engine more positions than the cache holds.
struct CacheOverflowError : std::runtime_error {
  explicit CacheOverflowError(const std::string& what) : std::runtime_error(what) {}
};

// A controller tried to observe state outside the positions it has cached.
struct LocalityViolationError : std::runtime_error {
  explicit LocalityViolationError(const std::string& what) : std::runtime_error(what) {}
};

// A representation decoded to something no valid encoding produces.
struct CorruptStateError : std::runtime_error {
  explicit CorruptStateError(const std::string& what) : std::runtime_error(what) {}
};

// Adversarial rewiring asked for a target the construction excludes.
struct InvalidTargetError : std::invalid_argument {
  explicit InvalidTargetError(const std::string& what) : std::invalid_argument(what) {}
};

// A conditional estimator saw zero conditioning events.
struct InsufficientSamplesError : std::runtime_error {
  explicit InsufficientSamplesError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kvchase
