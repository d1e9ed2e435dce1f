#pragma once

#include <stdexcept>
#include <string>

namespace dtc {

// Base for all library failures. Precondition violations derive from
// InvalidArgument so callers (the CLI) can tell config errors from runtime
// failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A vector whose norm fell below the normalization threshold. The
// factorization responds by re-initializing the current rank.
class DegenerateVector : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedFile : public Error {
 public:
  using Error::Error;
};

class TruncatedPayload : public MalformedFile {
 public:
  using MalformedFile::MalformedFile;
};

class RaggedCsv : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(column) + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace dtc
