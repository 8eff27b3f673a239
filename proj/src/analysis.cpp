#include "sympade/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "sympade/error.hpp"

namespace sympade {

namespace {

// Runs fn(path) for every path on up to options.workers threads and folds
// the per-path results into an Accumulator. fn returns std::nullopt for an
// aborted path. Errors other than aborted paths are rethrown on the caller.
template <class Accumulator, class PathFn>
Accumulator run_paths(std::size_t paths, const RunOptions& options, PathFn fn) {
  using Result = typename std::invoke_result_t<PathFn, std::size_t>::value_type;
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, paths));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  Accumulator total;

  if (options.deterministic_reduce) {
    std::vector<std::optional<Result>> results(paths);
    auto work = [&] {
      try {
        for (std::size_t p = next++; p < paths; p = next++) results[p] = fn(p);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next = paths;
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    for (const auto& r : results) total.add(r);
    return total;
  }

  auto work = [&] {
    Accumulator local;
    try {
      for (std::size_t p = next++; p < paths; p = next++) local.add(fn(p));
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
      next = paths;
      return;
    }
    std::lock_guard lock(mutex);
    total.merge(local);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return total;
}

struct SquaredErrorSum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  std::size_t aborted = 0;

  void add(const std::optional<double>& e2) {
    if (!e2) {
      ++aborted;
      return;
    }
    sum += *e2;
    sum_sq += *e2 * *e2;
    ++count;
  }
  void merge(const SquaredErrorSum& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
    aborted += o.aborted;
  }

  ErrorEstimate finish(double h) const {
    if (count == 0) throw Error(ErrorCode::step_failure, "every path aborted");
    ErrorEstimate est;
    est.h = h;
    est.paths = count;
    est.aborted = aborted;
    const double n = static_cast<double>(count);
    est.mse = sum / n;
    const double var = count > 1 ? std::max(0.0, (sum_sq - n * est.mse * est.mse) / (n - 1.0)) : 0.0;
    est.mse_stderr = std::sqrt(var / n);
    est.rms = std::sqrt(est.mse);
    est.rms_stderr = est.rms > 0.0 ? est.mse_stderr / (2.0 * est.rms) : 0.0;
    return est;
  }
};

double squared_distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool is_path_failure(const Error& e) {
  return e.code() == ErrorCode::singular_matrix || e.code() == ErrorCode::overflow ||
         e.code() == ErrorCode::step_failure;
}

}  // namespace

std::size_t step_count(double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw Error(ErrorCode::invalid_argument, "T and h must be positive");
  const double ratio = T / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::non_integral_step_count,
                "T/h = " + std::to_string(ratio) + " is not an integer");
  }
  return static_cast<std::size_t>(rounded);
}

ErrorEstimate strong_error(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x0,
                           double T, double h, std::size_t paths, std::uint64_t seed,
                           const RunOptions& options) {
  spec.validate();
  if (paths < 2) throw Error(ErrorCode::invalid_argument, "need at least two paths");
  if (x0.dim() != sys.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state dimension");
  const std::size_t steps = step_count(T, h);
  const std::size_t m = sys.channels();
  const double ell = spec.method == LinearMethod::pade ? spec.ell : 1.0;
  // Validates h < 1 up front rather than once per path.
  (void)truncation_bound(h, ell);

  auto path = [&](std::size_t p) -> std::optional<double> {
    NoiseStream stream(seed, p);
    Vector x = x0;
    Vector reference = x0;
    try {
      if (sys.commuting()) {
        for (std::size_t k = 0; k < steps; ++k) {
          const StepNoise noise = step_noise(stream, h, m, ell);
          reference = exact_linear_step(sys, reference, h, noise);
          x = step_linear(sys, spec, x, h, noise);
        }
      } else {
        const double fine_h = h / static_cast<double>(kFineReferenceRatio);
        const double scale = 1.0 / std::sqrt(static_cast<double>(kFineReferenceRatio));
        for (std::size_t k = 0; k < steps; ++k) {
          std::vector<double> coarse(m, 0.0);
          for (std::size_t f = 0; f < kFineReferenceRatio; ++f) {
            const StepNoise fine = step_noise(stream, fine_h, m, ell);
            reference = step_linear(sys, spec, reference, fine_h, fine);
            for (std::size_t i = 0; i < m; ++i) coarse[i] += scale * fine.xi[i];
          }
          x = step_linear(sys, spec, x, h, make_step_noise(h, std::move(coarse), ell));
        }
      }
    } catch (const Error& e) {
      if (is_path_failure(e)) return std::nullopt;
      throw;
    }
    return squared_distance(x, reference);
  };
  return run_paths<SquaredErrorSum>(paths, options, path).finish(h);
}

ErrorEstimate strong_error(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z0,
                           double T, double h, std::size_t paths, std::uint64_t seed,
                           const RunOptions& options) {
  spec.validate();
  if (paths < 2) throw Error(ErrorCode::invalid_argument, "need at least two paths");
  if (z0.dim() != sys.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state dimension");
  const std::size_t steps = step_count(T, h);
  const AdditiveStepper scheme(sys, spec, h);
  const AdditiveStepper exact(sys, AdditiveSchemeSpec{{1, 1}, {1, 1}, AdditiveVariant::exact}, h);
  const JointGaussianSpec joint_spec =
      additive_joint_spec(sys, h, spec.kernel_order, options.quad_nodes);

  auto path = [&](std::size_t p) -> std::optional<double> {
    NoiseStream stream(seed, p);
    Vector z = z0;
    Vector reference = z0;
    for (std::size_t k = 0; k < steps; ++k) {
      const JointSample joint = sample_joint(joint_spec, stream);
      reference = exact.advance(reference, joint);
      z = scheme.advance(z, joint);
    }
    return squared_distance(z, reference);
  };
  return run_paths<SquaredErrorSum>(paths, options, path).finish(h);
}

namespace {

template <class System, class Spec>
ErrorSeries error_series_impl(const System& sys, const Spec& spec, const Vector& x0, double T,
                              std::span<const double> grid, std::size_t paths, std::uint64_t seed,
                              const RunOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty step-size grid");
  ErrorSeries series;
  series.paths = paths;
  series.seed = seed;
  for (double h : grid) {
    const ErrorEstimate est = strong_error(sys, spec, x0, T, h, paths, seed, options);
    series.h_values.push_back(h);
    series.rms_errors.push_back(est.rms);
    series.std_errors.push_back(est.rms_stderr);
    series.aborted_paths += est.aborted;
  }
  return series;
}

}  // namespace

ErrorSeries error_series(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x0,
                         double T, std::span<const double> grid, std::size_t paths,
                         std::uint64_t seed, const RunOptions& options) {
  return error_series_impl(sys, spec, x0, T, grid, paths, seed, options);
}

ErrorSeries error_series(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z0,
                         double T, std::span<const double> grid, std::size_t paths,
                         std::uint64_t seed, const RunOptions& options) {
  return error_series_impl(sys, spec, z0, T, grid, paths, seed, options);
}

OrderFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::degenerate_series, "line fit needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::degenerate_series, "abscissae coincide");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
    fit.used.push_back(i);
  }
  return fit;
}

OrderFit fit_order(const ErrorSeries& series, bool drop_noisy) {
  const std::size_t n = series.h_values.size();
  if (series.rms_errors.size() != n) throw Error(ErrorCode::degenerate_series, "ragged series");
  std::vector<double> lx, ly;
  std::vector<std::size_t> used, dropped;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(series.rms_errors[i] > 0.0) || !(series.h_values[i] > 0.0)) {
      throw Error(ErrorCode::degenerate_series, "non-positive RMS or step size at point " + std::to_string(i));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (series.h_values[j] == series.h_values[i]) {
        throw Error(ErrorCode::degenerate_series, "repeated step size");
      }
    }
    const double se = i < series.std_errors.size() ? series.std_errors[i] : 0.0;
    if (drop_noisy && series.rms_errors[i] < kNoiseFloorFactor * se) {
      dropped.push_back(i);
      continue;
    }
    used.push_back(i);
    lx.push_back(std::log(series.h_values[i]));
    ly.push_back(std::log(series.rms_errors[i]));
  }
  if (used.size() < 3) throw Error(ErrorCode::degenerate_series, "fewer than three usable points");
  OrderFit fit = fit_line(lx, ly);
  fit.used = std::move(used);
  fit.dropped = std::move(dropped);
  return fit;
}

namespace {

double relative_drift(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::missing_diagnostics, "no Hamiltonian values");
  const double h0 = values.front();
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - h0));
  return worst / std::max(1.0, std::abs(h0));
}

}  // namespace

double hamiltonian_drift(const Trajectory& traj) {
  if (traj.hamiltonian.size() != traj.states.size() || traj.hamiltonian.empty()) {
    throw Error(ErrorCode::missing_diagnostics, "trajectory has no recorded Hamiltonian");
  }
  return relative_drift(traj.hamiltonian);
}

double hamiltonian_drift(const Trajectory& traj, const Matrix& c) {
  if (traj.states.empty()) throw Error(ErrorCode::missing_diagnostics, "empty trajectory");
  std::vector<double> values;
  values.reserve(traj.states.size());
  for (const Vector& x : traj.states) values.push_back(hamiltonian_quadratic(c, x));
  return relative_drift(values);
}

namespace {

struct MomentSum {
  std::vector<double> sum;
  std::size_t count = 0;
  std::size_t aborted = 0;

  void add(const std::optional<std::vector<double>>& values) {
    if (!values) {
      ++aborted;
      return;
    }
    if (sum.empty()) sum.assign(values->size(), 0.0);
    for (std::size_t k = 0; k < values->size(); ++k) sum[k] += (*values)[k];
    ++count;
  }
  void merge(const MomentSum& o) {
    if (o.count == 0) {
      aborted += o.aborted;
      return;
    }
    if (sum.empty()) sum.assign(o.sum.size(), 0.0);
    for (std::size_t k = 0; k < o.sum.size(); ++k) sum[k] += o.sum[k];
    count += o.count;
    aborted += o.aborted;
  }
};

}  // namespace

MomentSeries second_moment_growth(const AdditiveShs& sys, const AdditiveSchemeSpec& spec,
                                  const Vector& z0, double T, double h, std::size_t paths,
                                  std::uint64_t seed, const RunOptions& options) {
  spec.validate();
  if (paths < kMinMomentPaths) {
    throw Error(ErrorCode::invalid_argument,
                "moment growth needs at least " + std::to_string(kMinMomentPaths) + " paths");
  }
  if (z0.dim() != sys.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state dimension");
  const std::size_t steps = step_count(T, h);
  const AdditiveStepper scheme(sys, spec, h);
  const JointGaussianSpec joint_spec =
      additive_joint_spec(sys, h, spec.kernel_order, options.quad_nodes);

  auto path = [&](std::size_t p) -> std::optional<std::vector<double>> {
    NoiseStream stream(seed, p);
    std::vector<double> moments;
    moments.reserve(steps + 1);
    Vector z = z0;
    moments.push_back(dot(z, z));
    for (std::size_t k = 0; k < steps; ++k) {
      z = scheme.advance(z, sample_joint(joint_spec, stream));
      moments.push_back(dot(z, z));
    }
    return moments;
  };
  const MomentSum total = run_paths<MomentSum>(paths, options, path);
  if (total.count == 0) throw Error(ErrorCode::step_failure, "every path aborted");

  MomentSeries series;
  series.paths = total.count;
  series.aborted = total.aborted;
  for (std::size_t k = 0; k <= steps; ++k) {
    series.times.push_back(static_cast<double>(k) * h);
    series.second_moment.push_back(total.sum[k] / static_cast<double>(total.count));
  }
  const OrderFit fit = fit_line(series.times, series.second_moment);
  series.slope = fit.slope;
  series.intercept = fit.intercept;
  return series;
}

std::vector<double> zero_crossings(const Trajectory& traj, std::size_t component) {
  if (traj.states.empty()) throw Error(ErrorCode::invalid_argument, "empty trajectory");
  if (component >= traj.states.front().dim()) {
    throw Error(ErrorCode::invalid_argument, "component index out of range");
  }
  std::vector<double> crossings;
  std::optional<std::size_t> last;  // last sample with a nonzero value
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double y = traj.states[k][component];
    if (y == 0.0) continue;
    if (last) {
      const double y0 = traj.states[*last][component];
      if ((y0 < 0.0) != (y < 0.0)) {
        const double t0 = traj.times[*last];
        const double t1 = traj.times[k];
        crossings.push_back(t0 + (t1 - t0) * y0 / (y0 - y));
      }
    }
    last = k;
  }
  return crossings;
}

}  // namespace sympade
