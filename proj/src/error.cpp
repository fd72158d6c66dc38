#include "cce/error.hpp"

namespace cce {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::NonPositiveMetric: return "NonPositiveMetric";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DerivativeTolerance: return "DerivativeTolerance";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::FitConditioning: return "FitConditioning";
    case ErrorKind::UnstableFit: return "UnstableFit";
    case ErrorKind::CharacteristicFailure: return "CharacteristicFailure";
    case ErrorKind::QuadratureTolerance: return "QuadratureTolerance";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::BoundaryNotGeodesic: return "BoundaryNotGeodesic";
    case ErrorKind::NotAvailable: return "NotAvailable";
    case ErrorKind::ModelParameterError: return "ModelParameterError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string module, const std::string& what)
    : std::runtime_error(std::string(module) + ": " +
                         std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      module_(std::move(module)) {}

}  // namespace cce
