#include "sympade/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sympade/error.hpp"

namespace sympade {

namespace {

CheckOutcome at_most(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value <= bound};
}

CheckOutcome at_least(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value >= bound};
}

std::string scheme_name(const ExperimentConfig& cfg) {
  return cfg.is_linear() ? cfg.linear_scheme.name() : cfg.additive_scheme.name();
}

void add_metadata(CsvTable& table, const ExperimentConfig& cfg, Command command) {
  table.footer.push_back("experiment=" + cfg.name);
  table.footer.push_back("command=" + std::string(to_string(command)));
  table.footer.push_back("scheme=" + scheme_name(cfg));
  table.footer.push_back("seed=" + std::to_string(cfg.seed));
  table.footer.push_back("T=" + format_number(cfg.T));
}

void add_checks(ExperimentResult& result) {
  for (const auto& c : result.checks) result.table.footer.push_back(c.describe());
}

std::vector<std::string> component_names(std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  for (const char* base : {"p", "q"}) {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(prefix + base + (n == 1 ? std::string() : std::to_string(i + 1)));
    }
  }
  return out;
}

Trajectory simulate(const ExperimentConfig& cfg, const RecordOptions& record,
                    const RunOptions& options) {
  const double h = cfg.grid.front();
  const std::size_t steps = step_count(cfg.T, h);
  NoiseStream stream(cfg.seed, 0);
  if (cfg.is_linear()) {
    return integrate(cfg.linear_system(), cfg.linear_scheme, cfg.initial_state(), h, steps, stream,
                     record);
  }
  return integrate(cfg.additive_system(), cfg.additive_scheme, cfg.initial_state(), h, steps,
                   stream, record, options.quad_nodes);
}

}  // namespace

std::string CheckOutcome::describe() const {
  return "check " + name + " value=" + format_number(value) + " bound=" + format_number(bound) +
         (passed ? " PASS" : " FAIL");
}

bool ExperimentResult::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

ExperimentResult run_convergence(const ExperimentConfig& cfg, const RunOptions& options_in) {
  cfg.validate(Command::convergence);
  RunOptions options = options_in;
  options.quad_nodes = cfg.quad_nodes;
  const ErrorSeries series =
      cfg.is_linear()
          ? error_series(cfg.linear_system(), cfg.linear_scheme, cfg.initial_state(), cfg.T,
                         cfg.grid, cfg.paths, cfg.seed, options)
          : error_series(cfg.additive_system(), cfg.additive_scheme, cfg.initial_state(), cfg.T,
                         cfg.grid, cfg.paths, cfg.seed, options);
  const OrderFit fit = fit_order(series, cfg.drop_noisy);

  ExperimentResult result;
  result.table.header = {"h", "rms_error", "stderr"};
  for (std::size_t i = 0; i < series.h_values.size(); ++i) {
    result.table.add_row({series.h_values[i], series.rms_errors[i], series.std_errors[i]});
  }
  add_metadata(result.table, cfg, Command::convergence);
  auto& footer = result.table.footer;
  footer.push_back("paths=" + std::to_string(series.paths));
  footer.push_back("aborted_paths=" + std::to_string(series.aborted_paths));
  footer.push_back("slope=" + format_number(fit.slope));
  footer.push_back("intercept=" + format_number(fit.intercept));
  footer.push_back("max_residual=" + format_number(fit.max_residual));
  std::string dropped = "dropped_h=";
  for (std::size_t k = 0; k < fit.dropped.size(); ++k) {
    if (k) dropped += ';';
    dropped += format_number(series.h_values[fit.dropped[k]]);
  }
  footer.push_back(dropped + (fit.dropped.empty() ? "none" : ""));

  if (cfg.check.expect_slope) {
    const double expect = *cfg.check.expect_slope;
    result.checks.push_back(
        at_most("slope_deviation", std::abs(fit.slope - expect), cfg.check.slope_tol));
    // Largest relative growth of the error when stepping to a smaller h.
    std::vector<std::size_t> idx(series.h_values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return series.h_values[a] > series.h_values[b]; });
    double growth = 0.0;
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const double coarse = series.rms_errors[idx[k - 1]];
      const double fine = series.rms_errors[idx[k]];
      growth = std::max(growth, fine / coarse - 1.0);
    }
    result.checks.push_back(at_most("monotone_growth", growth, kMonotoneSlack));
  }
  add_checks(result);
  return result;
}

ExperimentResult run_trajectory(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate(Command::trajectory);
  const Trajectory traj = simulate(cfg, cfg.record, options);
  const std::size_t dim = traj.states.front().dim();

  ExperimentResult result;
  auto& header = result.table.header;
  header.push_back("t");
  for (auto& n : component_names(dim / 2, "")) header.push_back(n);
  if (cfg.record.exact) {
    for (auto& n : component_names(dim / 2, "exact_")) header.push_back(n);
  }
  if (cfg.record.hamiltonian) header.push_back("H");
  if (cfg.record.defect) header.push_back("defect");

  const double r0 = traj.states.front().norm2();
  double radius_error = 0.0;
  double exact_error = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<double> row{traj.times[k]};
    const auto& x = traj.states[k];
    row.insert(row.end(), x.entries().begin(), x.entries().end());
    if (cfg.record.exact) {
      const auto& e = traj.exact[k];
      row.insert(row.end(), e.entries().begin(), e.entries().end());
      exact_error = std::max(exact_error, max_abs_diff(x, e));
    }
    if (cfg.record.hamiltonian) row.push_back(traj.hamiltonian[k]);
    if (cfg.record.defect) row.push_back(traj.defect[k]);
    result.table.add_row(std::move(row));
    radius_error = std::max(radius_error, std::abs(x.norm2() - r0));
  }
  const std::size_t crossings = zero_crossings(traj, 0).size();

  add_metadata(result.table, cfg, Command::trajectory);
  auto& footer = result.table.footer;
  footer.push_back("h=" + format_number(traj.h));
  footer.push_back("zero_crossings_p=" + std::to_string(crossings));
  footer.push_back("max_radius_error=" + format_number(radius_error));
  if (cfg.record.exact) footer.push_back("max_exact_error=" + format_number(exact_error));

  if (cfg.check.max_radius_error) {
    result.checks.push_back(at_most("radius_error", radius_error, *cfg.check.max_radius_error));
  }
  if (cfg.check.max_exact_error) {
    if (!cfg.record.exact) throw Error(ErrorCode::config_error, "max_exact_error needs record exact");
    result.checks.push_back(at_most("exact_error", exact_error, *cfg.check.max_exact_error));
  }
  if (cfg.check.min_crossings) {
    result.checks.push_back(at_least("zero_crossings", static_cast<double>(crossings),
                                     static_cast<double>(*cfg.check.min_crossings)));
  }
  add_checks(result);
  return result;
}

ExperimentResult run_invariants(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate(Command::invariants);
  RecordOptions record = cfg.record;
  record.hamiltonian = true;
  record.defect = true;
  record.exact = false;
  const Trajectory traj = simulate(cfg, record, options);

  ExperimentResult result;
  result.table.header = {"t", "H", "defect"};
  double max_defect = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    result.table.add_row({traj.times[k], traj.hamiltonian[k], traj.defect[k]});
    max_defect = std::max(max_defect, traj.defect[k]);
  }
  const double drift = hamiltonian_drift(traj);

  add_metadata(result.table, cfg, Command::invariants);
  auto& footer = result.table.footer;
  footer.push_back("h=" + format_number(traj.h));
  footer.push_back("max_relative_drift=" + format_number(drift));
  footer.push_back("max_defect=" + format_number(max_defect));

  const auto& c = cfg.check;
  if (c.max_drift) result.checks.push_back(at_most("hamiltonian_drift", drift, *c.max_drift));
  if (c.min_drift) result.checks.push_back(at_least("hamiltonian_drift", drift, *c.min_drift));
  if (c.max_defect) result.checks.push_back(at_most("symplectic_defect", max_defect, *c.max_defect));
  if (c.min_defect) result.checks.push_back(at_least("symplectic_defect", max_defect, *c.min_defect));
  add_checks(result);
  return result;
}

ExperimentResult run_moment_growth(const ExperimentConfig& cfg, const RunOptions& options_in) {
  cfg.validate(Command::moment_growth);
  RunOptions options = options_in;
  options.quad_nodes = cfg.quad_nodes;
  const MomentSeries m = second_moment_growth(cfg.additive_system(), cfg.additive_scheme,
                                              cfg.initial_state(), cfg.T, cfg.grid.front(),
                                              cfg.paths, cfg.seed, options);
  ExperimentResult result;
  result.table.header = {"t", "second_moment"};
  for (std::size_t k = 0; k < m.times.size(); ++k) {
    result.table.add_row({m.times[k], m.second_moment[k]});
  }
  add_metadata(result.table, cfg, Command::moment_growth);
  auto& footer = result.table.footer;
  footer.push_back("h=" + format_number(cfg.grid.front()));
  footer.push_back("paths=" + std::to_string(m.paths));
  footer.push_back("aborted_paths=" + std::to_string(m.aborted));
  footer.push_back("slope=" + format_number(m.slope));
  footer.push_back("intercept=" + format_number(m.intercept));

  if (cfg.check.expect_moment_slope) {
    const double expect = *cfg.check.expect_moment_slope;
    if (expect == 0.0) {
      result.checks.push_back(at_most("moment_slope", std::abs(m.slope), cfg.check.moment_abs_tol));
    } else {
      result.checks.push_back(at_most("moment_slope_relative_error",
                                      std::abs(m.slope - expect) / std::abs(expect),
                                      cfg.check.moment_rel_tol));
    }
  }
  add_checks(result);
  return result;
}

ExperimentResult run_experiment(Command command, const ExperimentConfig& config,
                                const RunOptions& options) {
  switch (command) {
    case Command::convergence: return run_convergence(config, options);
    case Command::trajectory: return run_trajectory(config, options);
    case Command::invariants: return run_invariants(config, options);
    case Command::moment_growth: return run_moment_growth(config, options);
  }
  throw Error(ErrorCode::invalid_argument, "unknown command");
}

}  // namespace sympade
