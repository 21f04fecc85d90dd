#include "gluni/error.hpp"

namespace gluni {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateTangent: return "DegenerateTangent";
    case ErrorCode::UnresolvedWinding: return "UnresolvedWinding";
    case ErrorCode::ZeroChord: return "ZeroChord";
    case ErrorCode::SelfIntersection: return "SelfIntersection";
    case ErrorCode::OutsideDisk: return "OutsideDisk";
    case ErrorCode::NonconvergentTail: return "NonconvergentTail";
    case ErrorCode::CompatibilityFailure: return "CompatibilityFailure";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::MeshFailure: return "MeshFailure";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::PhaseClosureFailure: return "PhaseClosureFailure";
    case ErrorCode::NonconvergentLimit: return "NonconvergentLimit";
    case ErrorCode::BoundaryArgmax: return "BoundaryArgmax";
    case ErrorCode::NonClosedForm: return "NonClosedForm";
    case ErrorCode::InverseFailure: return "InverseFailure";
    case ErrorCode::ModulusTooSmall: return "ModulusTooSmall";
    case ErrorCode::NoReturn: return "NoReturn";
    case ErrorCode::CoreReached: return "CoreReached";
    case ErrorCode::HolomorphyFailure: return "HolomorphyFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

NumericalError::NumericalError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ConfigError::ConfigError(std::string path, const std::string& what)
    : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

void fail(ErrorCode code, const std::string& what) { throw NumericalError(code, what); }

}  // namespace gluni
