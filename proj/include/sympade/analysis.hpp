#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sympade/integrators.hpp"
#include "sympade/systems.hpp"

namespace sympade {

struct RunOptions {
  std::size_t workers = 1;
  // Reduce per-path results in path order so that output does not depend on
  // the worker count or on scheduling. Otherwise workers pull paths
  // dynamically and partial sums are merged as workers finish.
  bool deterministic_reduce = true;
  std::size_t quad_nodes = 32;
};

// Number of steps T/h; throws Error(non_integral_step_count) unless T/h is
// an integer to within 1e-9.
std::size_t step_count(double T, double h);

// Monte-Carlo estimate of [E |X_exact(T) - X_num(T)|^2]^{1/2}.
struct ErrorEstimate {
  double h = 0.0;
  double rms = 0.0;
  double rms_stderr = 0.0;  // delta method: mse_stderr / (2 rms)
  double mse = 0.0;
  double mse_stderr = 0.0;  // standard error of the mean squared error
  std::size_t paths = 0;    // paths that completed
  std::size_t aborted = 0;  // paths that hit a step failure
};

// Exact comparator and scheme run on the same draws: for commuting linear
// systems the comparator is the closed-form flow on the raw increments; for
// non-commuting ones it is the same scheme at h/64 whose fine increments sum
// to the coarse one. Path p draws from NoiseStream(seed, p).
ErrorEstimate strong_error(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x0,
                           double T, double h, std::size_t paths, std::uint64_t seed,
                           const RunOptions& options = {});
// Additive systems share one sampled (dW, I_exact, I_scheme) block per step.
ErrorEstimate strong_error(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z0,
                           double T, double h, std::size_t paths, std::uint64_t seed,
                           const RunOptions& options = {});

inline constexpr std::size_t kFineReferenceRatio = 64;

struct ErrorSeries {
  std::vector<double> h_values;
  std::vector<double> rms_errors;
  std::vector<double> std_errors;  // of the RMS values
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::size_t aborted_paths = 0;
};

ErrorSeries error_series(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x0,
                         double T, std::span<const double> grid, std::size_t paths,
                         std::uint64_t seed, const RunOptions& options = {});
ErrorSeries error_series(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z0,
                         double T, std::span<const double> grid, std::size_t paths,
                         std::uint64_t seed, const RunOptions& options = {});

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  std::vector<std::size_t> used;     // indices into the series
  std::vector<std::size_t> dropped;  // points below the noise floor
};

// Least squares line through (x, y). Needs >= 2 distinct x.
OrderFit fit_line(std::span<const double> x, std::span<const double> y);

// Slope of ln(rms) against ln(h). With drop_noisy, points whose RMS is
// below 4 standard errors are left out of the fit. Throws
// Error(degenerate_series) for a zero RMS, coinciding h values, or fewer
// than three usable points.
OrderFit fit_order(const ErrorSeries& series, bool drop_noisy = false);

inline constexpr double kNoiseFloorFactor = 4.0;

// max_k |H_k - H_0| / max(1, |H_0|) over the recorded Hamiltonian column.
// Throws Error(missing_diagnostics) if it was not recorded.
double hamiltonian_drift(const Trajectory& traj);
// Same, evaluating H(x) = x^T C x / 2 on the stored states.
double hamiltonian_drift(const Trajectory& traj, const Matrix& c);

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> second_moment;  // sample mean of |z_k|^2
  std::size_t paths = 0;
  std::size_t aborted = 0;
  double slope = 0.0;  // least squares over all times
  double intercept = 0.0;
};

inline constexpr std::size_t kMinMomentPaths = 100;

// Throws Error(invalid_argument) for fewer than kMinMomentPaths paths.
MomentSeries second_moment_growth(const AdditiveShs& sys, const AdditiveSchemeSpec& spec,
                                  const Vector& z0, double T, double h, std::size_t paths,
                                  std::uint64_t seed, const RunOptions& options = {});

// Sign-change times of one state component, linearly interpolated between
// the last nonzero sample and the first sample of opposite sign.
std::vector<double> zero_crossings(const Trajectory& traj, std::size_t component);

}  // namespace sympade
