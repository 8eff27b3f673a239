#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sympade/integrators.hpp"
#include "sympade/systems.hpp"

namespace sympade {

enum class Command { convergence, trajectory, invariants, moment_growth };

std::string_view to_string(Command command) noexcept;

enum class SystemKind { kubo, oscillator, linear, additive };

inline constexpr std::uint64_t kDefaultSeed = 20240917;

// Pass/fail thresholds evaluated by the experiment runners. Unset fields are
// not checked.
struct CheckThresholds {
  std::optional<double> expect_slope;  // convergence: fitted order
  double slope_tol = 0.25;
  std::optional<double> max_drift;     // invariants: relative Hamiltonian drift
  std::optional<double> min_drift;     // invariants: negative control
  std::optional<double> max_defect;    // invariants: symplectic defect
  std::optional<double> min_defect;    // invariants: negative control
  std::optional<double> max_radius_error;  // trajectory: | |x| - |x0| |
  std::optional<double> max_exact_error;   // trajectory: max |x - x_exact|
  std::optional<std::size_t> min_crossings;  // trajectory: zeros of p
  std::optional<double> expect_moment_slope;  // moment growth
  double moment_rel_tol = 0.1;
  double moment_abs_tol = 1e-9;  // used when the expected slope is zero
};

struct ExperimentConfig {
  std::string name = "custom";
  std::string description;
  SystemKind system = SystemKind::kubo;
  KuboParams kubo;
  OscillatorParams oscillator;
  std::vector<Matrix> generators;  // linear: drift first
  Matrix c0;                       // additive
  std::vector<Vector> c1;
  std::vector<Vector> c2;
  std::optional<Vector> x0;

  LinearSchemeSpec linear_scheme = LinearSchemeSpec::pade({1, 1});
  AdditiveSchemeSpec additive_scheme;

  std::vector<double> grid;
  double T = 1.0;
  std::size_t paths = 100;
  std::uint64_t seed = kDefaultSeed;
  bool seed_explicit = false;  // set by a `seed` key
  RecordOptions record;
  std::size_t quad_nodes = 32;
  bool drop_noisy = false;
  CheckThresholds check;

  bool is_linear() const noexcept {
    return system == SystemKind::kubo || system == SystemKind::linear;
  }
  LinearShs linear_system() const;
  AdditiveShs additive_system() const;
  Vector initial_state() const;

  // Grid values in (0, 1), T/h integral for each, at least one h, paths >=
  // 2, and a system/scheme pairing that the command supports. Throws
  // Error(config_error).
  void validate(Command command) const;
};

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> builtin_experiments();
// Parameterization of a builtin for one command. Throws Error(config_error)
// for an unknown name or a command the builtin does not support.
ExperimentConfig builtin_config(std::string_view name, Command command);

// Parses the key = value format documented in docs/config.md. Values are
// JSON literals; arrays may span lines. A `builtin` key, if present, must
// come first and seeds every other field. Errors name the offending line.
ExperimentConfig parse_config(std::string_view text, Command command);
ExperimentConfig load_config(const std::filesystem::path& path, Command command);

}  // namespace sympade
