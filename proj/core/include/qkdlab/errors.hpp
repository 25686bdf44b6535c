#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qkdlab {

enum class ErrorCode {
  ConfigInvalid,
  KeyTooShort,
  LengthMismatch,
  KeyExhausted,
  BadLength,
  UnknownParameter,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::KeyTooShort: return "KeyTooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::KeyExhausted: return "KeyExhausted";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qkdlab
