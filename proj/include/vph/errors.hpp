#pragma once

#include <stdexcept>
#include <string>

namespace vph {

// Invalid user-facing configuration (bad mesh size, malformed config file, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Linear algebra failure (singular factorization, non-neutral Poisson source, ...).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / output failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vph
