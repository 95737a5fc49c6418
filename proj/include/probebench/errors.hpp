#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace probebench {

// Base of every error thrown by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration or spec value is outside its documented domain.
class SpecError : public Error {
 public:
  SpecError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// An in-memory dataset breaks one of its invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

enum class FormatErrorKind {
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kOutOfRange,
  kNonFinite,
  kBadHeader,
  kIo,
};

const char* to_string(FormatErrorKind kind) noexcept;

// Raised while decoding a binary stream. `offset` is the byte position of the
// offending field.
class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& what);
  FormatErrorKind kind() const noexcept { return kind_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  FormatErrorKind kind_;
  std::uint64_t offset_;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class MetricsError : public Error {
 public:
  using Error::Error;
};

}  // namespace probebench
