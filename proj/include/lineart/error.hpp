#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lineart {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's domain.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class ShapeMismatch : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed input record. `record()` is the 0-based index of the offending
/// record (line for NDJSON, array element for plain JSON).
class ParseError : public Error {
public:
  ParseError(std::size_t record, const std::string& what)
    : Error("record " + std::to_string(record) + ": " + what)
    , record_(record) {}

  std::size_t record() const { return record_; }

private:
  std::size_t record_;
};

} // namespace lineart
