#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oblit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A record or config line that does not match its schema.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ", field \"" + field + "\": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by a caller (empty input, unknown id, bad size).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Pipeline stage ordering or artifact version problem.
class StageError : public Error {
 public:
  using Error::Error;
};

}  // namespace oblit
