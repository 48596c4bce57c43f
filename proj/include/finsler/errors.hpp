#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

enum class ErrorCode {
  invalid_parameter,
  config_invalid,
  io_error,
  domain_error,
  navigation_degenerate,
  zero_covector,
  critical_point,
  not_positive_definite,
  convergence_failure,
  degenerate_flag,
  isotropy_violation,
  specialization_mismatch,
  method_mismatch,
  quadrature_not_converged,
  insufficient_samples,
  focal_point,
  step_size_underflow,
};

// Exit-code buckets used by the CLI: bad inputs vs. numerical breakdowns.
inline bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_parameter:
    case ErrorCode::config_invalid:
    case ErrorCode::io_error:
    case ErrorCode::domain_error:
    case ErrorCode::navigation_degenerate:
    case ErrorCode::zero_covector:
    case ErrorCode::critical_point:
    case ErrorCode::degenerate_flag:
      return true;
    default:
      return false;
  }
}

// Machine-readable code strings emitted in JSON error reports.
inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_parameter: return "INVALID_PARAMETER";
    case ErrorCode::config_invalid: return "CONFIG_INVALID";
    case ErrorCode::io_error: return "IO_ERROR";
    case ErrorCode::domain_error: return "DOMAIN_ERROR";
    case ErrorCode::navigation_degenerate: return "NAVIGATION_DEGENERATE";
    case ErrorCode::zero_covector: return "ZERO_COVECTOR";
    case ErrorCode::critical_point: return "CRITICAL_POINT";
    case ErrorCode::not_positive_definite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::convergence_failure: return "CONVERGENCE_FAILURE";
    case ErrorCode::degenerate_flag: return "DEGENERATE_FLAG";
    case ErrorCode::isotropy_violation: return "ISOTROPY_VIOLATION";
    case ErrorCode::specialization_mismatch: return "SPECIALIZATION_MISMATCH";
    case ErrorCode::method_mismatch: return "METHOD_MISMATCH";
    case ErrorCode::quadrature_not_converged: return "QUADRATURE_NOT_CONVERGED";
    case ErrorCode::insufficient_samples: return "INSUFFICIENT_SAMPLES";
    case ErrorCode::focal_point: return "FOCAL_POINT";
    case ErrorCode::step_size_underflow: return "STEP_SIZE_UNDERFLOW";
  }
  return "UNKNOWN";
}

class FinslerError : public std::runtime_error {
 public:
  FinslerError(ErrorCode code, std::string message, std::string context = {})
      : std::runtime_error(std::string(error_name(code)) + ": " + message +
                           (context.empty() ? "" : " [" + context + "]")),
        code_(code),
        message_(std::move(message)),
        context_(std::move(context)) {}

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  const std::string& context() const { return context_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string context_;
};

}  // namespace finsler
