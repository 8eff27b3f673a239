// sympade: run convergence, trajectory, invariant and moment-growth
// experiments for the Padé symplectic schemes and emit CSV.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 a --check
// threshold failed.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sympade/config.hpp"
#include "sympade/error.hpp"
#include "sympade/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

struct CommandArgs {
  std::string config_path;
  std::string builtin;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::size_t workers = 0;
  std::string out;
  bool check = false;
  bool deterministic_reduce = false;
  bool unordered_reduce = false;
};

void add_common_options(CLI::App* sub, CommandArgs& args) {
  auto* config = sub->add_option("--config", args.config_path, "Experiment config file")
                     ->check(CLI::ExistingFile);
  auto* builtin = sub->add_option("--builtin", args.builtin, "Builtin experiment name (see --list)");
  config->excludes(builtin);
  sub->add_option("--seed", args.seed, "Master seed (overrides config and SYMPADE_SEED)");
  sub->add_option("--paths", args.paths, "Monte-Carlo path count")->check(CLI::PositiveNumber);
  sub->add_option("--workers", args.workers, "Worker threads (default: hardware concurrency)");
  sub->add_option("--out", args.out, "Output CSV path (default: stdout)");
  sub->add_flag("--check", args.check, "Apply the acceptance thresholds and set the exit code");
  auto* det = sub->add_flag("--deterministic-reduce", args.deterministic_reduce,
                            "Accumulate per-path results in path order (default)");
  auto* unordered = sub->add_flag("--unordered-reduce", args.unordered_reduce,
                                  "Merge per-worker partial sums as workers finish");
  det->excludes(unordered);
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SYMPADE_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t value = 0;
  const std::string_view text(raw);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw sympade::Error(sympade::ErrorCode::config_error,
                         "SYMPADE_SEED is not an unsigned 64-bit integer: '" + std::string(text) + "'");
  }
  return value;
}

sympade::ExperimentConfig resolve_config(sympade::Command command, const CommandArgs& args) {
  using sympade::ErrorCode;
  sympade::ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = sympade::load_config(args.config_path, command);
  } else if (!args.builtin.empty()) {
    cfg = sympade::builtin_config(args.builtin, command);
  } else {
    throw sympade::Error(ErrorCode::config_error, "one of --config or --builtin is required");
  }
  if (args.seed) {
    cfg.seed = *args.seed;
  } else if (!cfg.seed_explicit) {
    if (const auto s = env_seed()) cfg.seed = *s;
  }
  if (args.paths) cfg.paths = *args.paths;
  return cfg;
}

int run(sympade::Command command, const CommandArgs& args) {
  const auto cfg = resolve_config(command, args);
  sympade::RunOptions options;
  options.workers = args.workers ? args.workers : std::max(1u, std::thread::hardware_concurrency());
  options.deterministic_reduce = !args.unordered_reduce;
  options.quad_nodes = cfg.quad_nodes;

  const auto result = sympade::run_experiment(command, cfg, options);
  const std::string csv = result.table.render();
  if (args.out.empty()) {
    std::cout << csv << std::flush;
  } else {
    std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw sympade::Error(sympade::ErrorCode::config_error, "cannot write '" + args.out + "'");
    }
    file << csv;
    if (!file.flush()) {
      throw sympade::Error(sympade::ErrorCode::config_error, "write to '" + args.out + "' failed");
    }
  }
  if (args.check) {
    for (const auto& c : result.checks) std::cerr << c.describe() << '\n';
    if (result.checks.empty()) std::cerr << "no thresholds configured for this experiment\n";
    if (!result.passed()) return kExitCheck;
  }
  return kExitOk;
}

int exit_code_for(const sympade::Error& e) {
  if (e.code() == sympade::ErrorCode::step_failure || e.is_numerical()) return kExitNumerical;
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Padé symplectic schemes for stochastic Hamiltonian systems"};
  app.name("sympade");
  bool list = false;
  app.add_flag("--list", list, "List builtin experiments and exit");
  app.require_subcommand(0, 1);

  struct Entry {
    sympade::Command command;
    const char* name;
    const char* help;
    CommandArgs args;
    CLI::App* sub = nullptr;
  };
  Entry entries[] = {
      {sympade::Command::convergence, "convergence", "Strong error per step size and fitted order", {}},
      {sympade::Command::trajectory, "trajectory", "One sample path with optional diagnostics", {}},
      {sympade::Command::invariants, "invariants", "Hamiltonian and symplectic defect along a path", {}},
      {sympade::Command::moment_growth, "moment-growth", "Mean of |z|^2 over time and its slope", {}},
  };
  for (auto& e : entries) {
    e.sub = app.add_subcommand(e.name, e.help);
    add_common_options(e.sub, e.args);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (list) {
    for (const auto& b : sympade::builtin_experiments()) {
      std::cout << b.name << "\n    " << b.description << '\n';
    }
    return kExitOk;
  }

  for (const auto& e : entries) {
    if (!e.sub->parsed()) continue;
    try {
      return run(e.command, e.args);
    } catch (const sympade::Error& err) {
      std::cerr << "sympade " << e.name << ": " << err.what() << '\n';
      return exit_code_for(err);
    } catch (const std::exception& err) {
      std::cerr << "sympade " << e.name << ": " << err.what() << '\n';
      return kExitNumerical;
    }
  }
  std::cerr << app.help();
  return kExitConfig;
}
