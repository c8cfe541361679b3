#pragma once

#include <stdexcept>
#include <string>

namespace offprof {

// Input data failed to parse or validate. The message carries
// "<source>:<line>: ..." when a line position is known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A run-configuration value violates a documented invariant.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace offprof
