#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bugchat {

enum class ErrorKind {
  kNotFound,
  kModelIntegrity,
  kParse,
  kValidation,
  kProtocol,
  kInvalidOption,
  kBusy,
  kInvalidatedPrediction,
  kEmptyInput,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Base class for every error raised by the library. The kind drives the
/// HTTP status and CLI exit code chosen by the outer layers.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message)
      : Error(ErrorKind::kNotFound, message) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message)
      : Error(ErrorKind::kProtocol, message) {}
};

/// Malformed structured text; `byte_offset` points at the offending byte.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset)
      : Error(ErrorKind::kParse, message), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Well-formed input that violates a schema rule.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::string field,
                  std::optional<long long> event_sequence = std::nullopt)
      : Error(ErrorKind::kValidation, message),
        field_(std::move(field)),
        event_sequence_(event_sequence) {}

  const std::string& field() const noexcept { return field_; }
  std::optional<long long> event_sequence() const noexcept {
    return event_sequence_;
  }

 private:
  std::string field_;
  std::optional<long long> event_sequence_;
};

}  // namespace bugchat
