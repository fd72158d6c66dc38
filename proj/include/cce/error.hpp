#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cce {

enum class ErrorKind {
  SingularMetric,
  NonPositiveMetric,
  DomainError,
  DerivativeTolerance,
  UnsupportedDimension,
  FitConditioning,
  UnstableFit,
  CharacteristicFailure,
  QuadratureTolerance,
  SolverFailure,
  PositivityViolation,
  BoundaryNotGeodesic,
  NotAvailable,
  ModelParameterError,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. `module` names the component that
/// raised it so the CLI can report where a pipeline stopped.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace cce
