#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecoc_rl {

/// Invalid configuration value (learner, rollout or experiment settings).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside an operation's domain (bad index, dimension mismatch...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(format(line, column, what)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& what) {
    std::string out = "parse error";
    if (line != 0) {
      out += " at line " + std::to_string(line);
      if (column != 0) out += ", column " + std::to_string(column);
    }
    return out + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace ecoc_rl
