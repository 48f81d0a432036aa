#pragma once

#include <stdexcept>
#include <string>

namespace percrs {

// Bad catalog, bad config file, bad CLI arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric requested on an input where it has no value (empty set, no
// successful sessions, ...).
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedCorrelationError : public UndefinedMetricError {
 public:
  using UndefinedMetricError::UndefinedMetricError;
};

}  // namespace percrs
