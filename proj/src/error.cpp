#include "shrinker/error.hpp"

namespace shrinker {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parameter: return "E_PARAM";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Unsupported: return "E_UNSUPPORTED";
    case ErrorCode::Topology: return "E_TOPOLOGY";
    case ErrorCode::Domain: return "E_DOMAIN";
    case ErrorCode::Undefined: return "E_UNDEFINED";
    case ErrorCode::Precondition: return "E_PRECONDITION";
    case ErrorCode::Convergence: return "E_CONVERGENCE";
    case ErrorCode::Inconclusive: return "E_INCONCLUSIVE";
    case ErrorCode::Stall: return "E_STALL";
    case ErrorCode::Quality: return "E_QUALITY";
    case ErrorCode::Selection: return "E_SELECTION";
    case ErrorCode::Collar: return "E_COLLAR";
    case ErrorCode::NotSweepout: return "E_NOT_SWEEPOUT";
    case ErrorCode::Resolution: return "E_RESOLUTION";
    case ErrorCode::Io: return "E_IO";
  }
  return "E_UNKNOWN";
}

Error::Error(ErrorCode code, std::string module, const std::string& message)
    : std::runtime_error(message), code_(code), module_(std::move(module)) {}

ParseError::ParseError(int line, const std::string& message)
    : Error(ErrorCode::Parse, "mesh-core", "line " + std::to_string(line) + ": " + message),
      line_(line) {}

void fail(ErrorCode code, const std::string& module, const std::string& message) {
  throw Error(code, module, message);
}

}  // namespace shrinker
