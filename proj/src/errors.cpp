#include "bugchat/errors.hpp"

namespace bugchat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound:
      return "not_found";
    case ErrorKind::kModelIntegrity:
      return "model_integrity";
    case ErrorKind::kParse:
      return "parse_error";
    case ErrorKind::kValidation:
      return "validation_error";
    case ErrorKind::kProtocol:
      return "protocol_error";
    case ErrorKind::kInvalidOption:
      return "invalid_option";
    case ErrorKind::kBusy:
      return "busy";
    case ErrorKind::kInvalidatedPrediction:
      return "invalidated_prediction";
    case ErrorKind::kEmptyInput:
      return "empty_input";
    case ErrorKind::kIo:
      return "io_error";
  }
  return "unknown";
}

}  // namespace bugchat
