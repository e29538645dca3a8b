#pragma once

#include <stdexcept>
#include <string>

namespace apd {

enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  BudgetExceeded,
  NonRealResult,
  CertificationFailed,
  PreconditionFailed,
  SubspaceTooSmall,
  BudgetExhausted,
  RetriesExhausted,
  Format,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NonRealResult: return "NonRealResult";
    case ErrorKind::CertificationFailed: return "CertificationFailed";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::SubspaceTooSmall: return "SubspaceTooSmall";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::Format: return "Format";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace apd
