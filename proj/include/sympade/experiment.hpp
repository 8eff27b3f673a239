#pragma once

#include <string>
#include <vector>

#include "sympade/analysis.hpp"
#include "sympade/config.hpp"
#include "sympade/csv.hpp"

namespace sympade {

struct CheckOutcome {
  std::string name;
  double value = 0.0;
  double bound = 0.0;  // the threshold that value was compared against
  bool passed = false;

  std::string describe() const;
};

struct ExperimentResult {
  CsvTable table;
  std::vector<CheckOutcome> checks;

  bool passed() const noexcept;
};

// Each runner validates the config for its command, then returns the CSV
// with run metadata and check outcomes in the footer.
//   convergence:   h, rms_error, stderr
//   trajectory:    t, state components, [exact components], [H], [defect]
//   invariants:    t, H, defect
//   moment-growth: t, second_moment
ExperimentResult run_convergence(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult run_trajectory(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult run_invariants(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentResult run_moment_growth(const ExperimentConfig& config, const RunOptions& options = {});

ExperimentResult run_experiment(Command command, const ExperimentConfig& config,
                                const RunOptions& options = {});

// Relative slack allowed between adjacent RMS values when checking that the
// error does not grow as h shrinks.
inline constexpr double kMonotoneSlack = 0.05;

}  // namespace sympade
