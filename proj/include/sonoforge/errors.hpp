#pragma once

#include <stdexcept>
#include <string>

namespace sonoforge {

enum class ErrorCode {
  FileNotFound,
  MalformedWav,
  UnsupportedCodec,
  EmptyClip,
  SilentClip,
  InvalidArgument,
  ShapeMismatch,
  ConstantMatrix,
  MissingPattern,
  ParseError,
  IoError,
};

/// Library error carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) raise(code, msg);
}

}  // namespace sonoforge
