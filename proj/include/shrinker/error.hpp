#pragma once

#include <stdexcept>
#include <string>

namespace shrinker {

enum class ErrorCode {
  Parameter,
  Parse,
  Unsupported,
  Topology,
  Domain,
  Undefined,
  Precondition,
  Convergence,
  Inconclusive,
  Stall,
  Quality,
  Selection,
  Collar,
  NotSweepout,
  Resolution,
  Io,
};

const char* error_code_name(ErrorCode code);

// All library failures. `module` names the component that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message);
  ErrorCode code() const { return code_; }
  const std::string& module() const { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& module, const std::string& message);

}  // namespace shrinker
