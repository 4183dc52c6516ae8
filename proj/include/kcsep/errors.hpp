#pragma once

#include <stdexcept>
#include <string>

namespace kcsep {

/// Raised when a parameter lies outside its documented domain.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a lattice is too small for a window, or an enumeration too large.
class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

}  // namespace kcsep
