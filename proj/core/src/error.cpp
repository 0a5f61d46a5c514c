#include "opcond/error.hpp"

namespace opcond {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_mesh: return "invalid-mesh";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::unsupported_configuration: return "unsupported-configuration";
    case ErrorCode::unsupported_degree: return "unsupported-degree";
    case ErrorCode::coercivity_risk: return "coercivity-risk";
    case ErrorCode::rescale_required: return "rescale-required";
    case ErrorCode::breakdown: return "breakdown";
    case ErrorCode::indefinite: return "indefinite";
    case ErrorCode::factorization: return "factorization";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(int line, const std::string& message)
    : Error(ErrorCode::parse, line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

}  // namespace opcond
