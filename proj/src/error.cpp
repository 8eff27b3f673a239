#include "sympade/error.hpp"

namespace sympade {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::odd_dimension: return "OddDimension";
    case ErrorCode::singular_matrix: return "SingularMatrix";
    case ErrorCode::overflow: return "Overflow";
    case ErrorCode::degenerate_step: return "DegenerateStep";
    case ErrorCode::quadrature_failure: return "QuadratureFailure";
    case ErrorCode::not_infinitesimal_symplectic: return "NotInfinitesimalSymplectic";
    case ErrorCode::not_symmetric: return "NotSymmetric";
    case ErrorCode::non_commuting_generators: return "NonCommutingGenerators";
    case ErrorCode::spec_mismatch: return "SpecMismatch";
    case ErrorCode::step_failure: return "StepFailure";
    case ErrorCode::non_integral_step_count: return "NonIntegralStepCount";
    case ErrorCode::degenerate_series: return "DegenerateSeries";
    case ErrorCode::missing_diagnostics: return "MissingDiagnostics";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case ErrorCode::singular_matrix:
    case ErrorCode::overflow:
    case ErrorCode::quadrature_failure:
    case ErrorCode::step_failure:
    case ErrorCode::degenerate_series:
      return true;
    default:
      return false;
  }
}

}  // namespace sympade
