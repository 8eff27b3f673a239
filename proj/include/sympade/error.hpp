#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sympade {

enum class ErrorCode {
  invalid_argument,
  non_finite,
  dimension_mismatch,
  odd_dimension,
  singular_matrix,
  overflow,
  degenerate_step,
  quadrature_failure,
  not_infinitesimal_symplectic,
  not_symmetric,
  non_commuting_generators,
  spec_mismatch,
  step_failure,
  non_integral_step_count,
  degenerate_series,
  missing_diagnostics,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this one exception type;
// callers branch on code() rather than on a class hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for failures that come from the numerics (a singular Padé
  // denominator, overflow in the exponential) rather than from bad input.
  bool is_numerical() const noexcept;

 private:
  ErrorCode code_;
};

// A step failure carries the index of the step that failed and the code of
// the underlying numerical error.
class StepError : public Error {
 public:
  StepError(std::size_t step, ErrorCode cause, const std::string& what)
      : Error(ErrorCode::step_failure, "step " + std::to_string(step) + ": " + what),
        step_(step),
        cause_(cause) {}

  std::size_t step() const noexcept { return step_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t step_;
  ErrorCode cause_;
};

}  // namespace sympade
