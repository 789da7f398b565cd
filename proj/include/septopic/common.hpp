#pragma once

// Shared error types and small typedefs used across the library.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace septopic {

inline constexpr const char* kVersion = "0.1.0";

/// Base class for all library errors so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Invalid configuration value (out of range, inconsistent, missing).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Threshold clustering found a number of connected components different
/// from the requested cluster count.
class ComponentCountError : public Error {
 public:
  ComponentCountError(std::size_t found, std::size_t expected)
      : Error("threshold clustering found " + std::to_string(found) +
              " components, expected " + std::to_string(expected)),
        found_(found),
        expected_(expected) {}
  std::size_t found() const { return found_; }
  std::size_t expected() const { return expected_; }

 private:
  std::size_t found_;
  std::size_t expected_;
};

/// One sparse row/column: (index, value) pairs sorted by index.
using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

}  // namespace septopic
