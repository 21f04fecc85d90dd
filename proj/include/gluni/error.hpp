#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gluni {

enum class ErrorCode {
  DegenerateTangent,
  UnresolvedWinding,
  ZeroChord,
  SelfIntersection,
  OutsideDisk,
  NonconvergentTail,
  CompatibilityFailure,
  QuadratureFailure,
  MeshFailure,
  SolverFailure,
  TooCloseToBoundary,
  NonMonotone,
  PhaseClosureFailure,
  NonconvergentLimit,
  BoundaryArgmax,
  NonClosedForm,
  InverseFailure,
  ModulusTooSmall,
  NoReturn,
  CoreReached,
  HolomorphyFailure,
  InvalidArgument,
};

[[nodiscard]] std::string_view to_string(ErrorCode code);

// Numerical or contract failure raised by any module. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what);
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Bad user input (config schema, CLI usage). Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what);
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace gluni
