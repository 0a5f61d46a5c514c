#pragma once

#include <stdexcept>
#include <string>

namespace opcond {

/// Failure categories shared by every module.
enum class ErrorCode {
  invalid_argument,
  invalid_mesh,
  shape_mismatch,
  unsupported_configuration,
  unsupported_degree,
  coercivity_risk,
  rescale_required,
  breakdown,
  indefinite,
  factorization,
  parse,
  io
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Configuration error carrying the 1-based line number (0 when not tied to a line).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace opcond
