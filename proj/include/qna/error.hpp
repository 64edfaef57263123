#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qna {

enum class ErrorKind {
  io,
  parse,
  invalid_argument,
  insufficient_data,
  degenerate,
  numerical,
  config,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` lets callers (and the CLI)
/// branch on the failure class without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace qna
