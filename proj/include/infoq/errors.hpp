#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace infoq {

// Base for every error raised by the library. Callers that only care about
// "something in infoq failed" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class CellCapExceeded : public Error {
 public:
  using Error::Error;
};

class NameCollision : public Error {
 public:
  using Error::Error;
};

class UnknownVariable : public Error {
 public:
  using Error::Error;
};

class ZeroProbabilityEvent : public Error {
 public:
  using Error::Error;
};

class NonPositiveProbability : public Error {
 public:
  using Error::Error;
};

class SupportMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidQuery : public Error {
 public:
  using Error::Error;
};

class MissingQDistribution : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ZeroEvidence : public Error {
 public:
  using Error::Error;
};

class BatchTooLarge : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MismatchAgainstPaper : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message);

  // Zero-based byte offset into the input.
  std::size_t offset() const noexcept { return offset_; }
  // One-based column, i.e. offset() + 1.
  std::size_t column() const noexcept { return offset_ + 1; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
  std::string detail_;
};

}  // namespace infoq
