#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace afroasr {

/// Base for every error raised by the library. The CLI maps these to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed records, broken invariants, missing ids.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A record-level problem in a line-oriented input file.
class RecordError : public DataError {
 public:
  enum class Kind { kMalformed, kDuplicateId, kMissingField, kInvalidValue };

  RecordError(Kind kind, std::string source, std::size_t line, std::string detail)
      : DataError(source + ":" + std::to_string(line) + ": " + detail),
        kind_(kind),
        line_(line),
        detail_(std::move(detail)) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string detail_;
};

/// File could not be opened or read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Remote service failure (HTTP status, schema mismatch, exhausted retries).
class RemoteError : public Error {
 public:
  using Error::Error;
};

}  // namespace afroasr
