#pragma once

#include <stdexcept>
#include <string>

namespace nwtd {

/// Invalid configuration or sizes. CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time value that does not sit on the simulation mesh.
class AlignmentError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// File system or parse failure on an input/output file. CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric domain violations use std::domain_error (CLI exit code 3).

}  // namespace nwtd
