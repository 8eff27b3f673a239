#include "sympade/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sympade/analysis.hpp"
#include "sympade/error.hpp"

namespace sympade {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorCode::config_error, what); }

// Message without the "code: " prefix, for rewrapping with context.
std::string bare(const Error& e) {
  const std::string msg = e.what();
  if (e.code() != ErrorCode::config_error) return msg;
  const auto p = msg.find(": ");
  return p == std::string::npos ? msg : msg.substr(p + 2);
}

const std::vector<double> kKuboGrid{0.01, 0.02, 0.025, 0.05, 0.1};
const std::vector<double> kOscillatorGrid{0.2, 0.1, 0.05, 0.04};

struct BuiltinEntry {
  const char* name;
  const char* alias;  // accepted by name lookup, not listed; empty when none
  const char* description;
};

const BuiltinEntry kBuiltins[] = {
    {"kubo-(1,1)", "",
     "Kubo oscillator a=1 sigma=1 from (p,q)=(1,0), Pade (1,1) midpoint scheme; convergence "
     "T=5 h={0.01,0.02,0.025,0.05,0.1} 1000 paths, expected order 1; trajectory and invariants "
     "T=100 h=0.02"},
    {"kubo-(2,2)", "", "Kubo oscillator, Pade (2,2) scheme, expected order 2; same grids as kubo-(1,1)"},
    {"kubo-(3,3)", "", "Kubo oscillator, Pade (3,3) scheme, expected order 3; same grids as kubo-(1,1)"},
    {"kubo-(4,4)", "", "Kubo oscillator, Pade (4,4) scheme, expected order 4; same grids as kubo-(1,1)"},
    {"kubo-(1,2)", "",
     "Kubo oscillator, non-diagonal Pade (1,2) scheme; negative control whose symplectic defect "
     "is visibly nonzero"},
    {"kubo-euler-maruyama", "",
     "Kubo oscillator, explicit Euler-Maruyama; negative control whose Hamiltonian drifts"},
    {"oscillator-integral", "oscillator-5.8",
     "Linear stochastic oscillator sigma=0.3 from (p,q)=(0,1), Pade (2,2) drift with (1,1) "
     "kernel in the stochastic integral; convergence T=20 h={0.2,0.1,0.05,0.04} 500 paths, "
     "expected order 3; moment growth T=500 h=0.1 500 paths, expected slope sigma^2"},
    {"oscillator-rectangle", "oscillator-5.9",
     "Linear stochastic oscillator sigma=0.3, Pade (1,1) drift with left-rectangle noise; "
     "convergence 1000 paths, expected order 1; moment growth as oscillator-integral"},
    {"oscillator-sigma0", "",
     "Oscillator with sigma=0, integral scheme; moment growth slope 0 and trajectory matching "
     "the deterministic rotation"},
};

const BuiltinEntry* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name || (*b.alias && name == b.alias)) return &b;
  }
  return nullptr;
}

void set_single_step(ExperimentConfig& cfg, double T, double h) {
  cfg.T = T;
  cfg.grid = {h};
  cfg.paths = 1;
}

ExperimentConfig kubo_builtin(std::string_view name, Command command) {
  ExperimentConfig cfg;
  cfg.system = SystemKind::kubo;
  cfg.kubo = KuboParams{};
  bool diagonal = false;
  if (name == "kubo-euler-maruyama") {
    cfg.linear_scheme = LinearSchemeSpec::euler_maruyama();
  } else {
    // "kubo-(r,s)"
    const int r = name[6] - '0';
    const int s = name[8] - '0';
    cfg.linear_scheme = LinearSchemeSpec::pade({r, s});
    diagonal = r == s;
    if (diagonal) cfg.check.expect_slope = r;
  }
  switch (command) {
    case Command::convergence:
      cfg.T = 5.0;
      cfg.grid = kKuboGrid;
      cfg.paths = 1000;
      cfg.drop_noisy = true;
      cfg.check.slope_tol = 0.25;
      break;
    case Command::trajectory:
      set_single_step(cfg, 100.0, 0.02);
      cfg.record.exact = true;
      cfg.record.hamiltonian = true;
      if (diagonal) cfg.check.max_radius_error = 1e-4;
      break;
    case Command::invariants:
      set_single_step(cfg, 100.0, 0.02);
      if (diagonal) {
        cfg.check.max_drift = 1e-8;
        cfg.check.max_defect = 1e-9;
      } else if (name == "kubo-euler-maruyama") {
        cfg.check.min_drift = 1e-2;
      } else {
        cfg.check.min_defect = 1e-6;
      }
      break;
    case Command::moment_growth:
      config_fail("builtin '" + std::string(name) +
                  "' is a linear system; moment growth needs an additive system");
  }
  return cfg;
}

ExperimentConfig oscillator_builtin(const BuiltinEntry& entry, Command command) {
  const std::string_view name = entry.name;
  ExperimentConfig cfg;
  cfg.system = SystemKind::oscillator;
  cfg.oscillator = OscillatorParams{};
  const bool rectangle = name == "oscillator-rectangle";
  const bool deterministic = name == "oscillator-sigma0";
  if (deterministic) cfg.oscillator.sigma = 0.0;
  if (rectangle) {
    cfg.additive_scheme = {{1, 1}, {1, 1}, AdditiveVariant::left_rectangle};
  } else {
    cfg.additive_scheme = {{2, 2}, {1, 1}, AdditiveVariant::integral};
  }
  const double sigma = cfg.oscillator.sigma;
  switch (command) {
    case Command::convergence:
      if (deterministic) config_fail("builtin 'oscillator-sigma0' has no noise to converge against");
      cfg.T = 20.0;
      cfg.grid = kOscillatorGrid;
      cfg.paths = rectangle ? 1000 : 500;
      cfg.drop_noisy = true;
      cfg.check.expect_slope = rectangle ? 1.0 : 3.0;
      cfg.check.slope_tol = rectangle ? 0.2 : 0.3;
      break;
    case Command::trajectory:
      if (deterministic) {
        set_single_step(cfg, 20.0, 0.01);
        cfg.check.max_exact_error = 1e-6;
      } else {
        set_single_step(cfg, 500.0, 0.1);
        cfg.check.min_crossings = 100;
      }
      cfg.record.exact = true;
      cfg.record.hamiltonian = true;
      break;
    case Command::invariants:
      set_single_step(cfg, 500.0, 0.1);
      cfg.check.max_defect = 1e-9;
      if (deterministic) cfg.check.max_drift = 1e-8;
      break;
    case Command::moment_growth:
      cfg.T = 500.0;
      cfg.grid = {0.1};
      cfg.paths = 500;
      cfg.check.expect_moment_slope = sigma * sigma;
      cfg.check.moment_rel_tol = 0.1;
      break;
  }
  return cfg;
}

// ---- value conversion ----

double to_real(const json& v, const std::string& key) {
  if (!v.is_number()) config_fail("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_fail("'" + key + "' must be finite");
  return x;
}

std::size_t to_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    config_fail("'" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> to_reals(const json& v, const std::string& key) {
  if (!v.is_array()) config_fail("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(to_real(e, key));
  return out;
}

Vector to_vector(const json& v, const std::string& key) { return Vector(to_reals(v, key)); }

Matrix to_matrix(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) config_fail("'" + key + "' must be a nonempty array of rows");
  const std::size_t n = v.size();
  std::vector<double> entries;
  entries.reserve(n * n);
  for (const auto& row : v) {
    const auto r = to_reals(row, key);
    if (r.size() != n) config_fail("'" + key + "' must be square");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return Matrix(n, std::move(entries));
}

std::vector<Matrix> to_matrices(const json& v, const std::string& key) {
  if (!v.is_array()) config_fail("'" + key + "' must be an array of matrices");
  std::vector<Matrix> out;
  for (const auto& m : v) out.push_back(to_matrix(m, key));
  return out;
}

std::vector<Vector> to_vectors(const json& v, const std::string& key) {
  if (!v.is_array()) config_fail("'" + key + "' must be an array of vectors");
  std::vector<Vector> out;
  for (const auto& e : v) out.push_back(to_vector(e, key));
  return out;
}

PadePair to_pair(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    config_fail("'" + key + "' must be [r, s]");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

bool to_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) config_fail("'" + key + "' must be true or false");
  return v.get<bool>();
}

std::string to_str(const json& v, const std::string& key) {
  if (!v.is_string()) config_fail("'" + key + "' must be a string");
  return v.get<std::string>();
}

// Scheme fields can precede the system key, so they are resolved after the
// whole file has been read.
struct PendingScheme {
  std::optional<std::string> scheme;
  std::optional<PadePair> order;
  std::optional<double> ell;
  std::optional<PadePair> drift_order;
  std::optional<PadePair> kernel_order;
};

void apply_key(ExperimentConfig& cfg, PendingScheme& pending, const std::string& key,
               const json& v) {
  if (key == "name") {
    cfg.name = to_str(v, key);
  } else if (key == "system") {
    const auto s = to_str(v, key);
    if (s == "kubo") cfg.system = SystemKind::kubo;
    else if (s == "oscillator") cfg.system = SystemKind::oscillator;
    else if (s == "linear") cfg.system = SystemKind::linear;
    else if (s == "additive") cfg.system = SystemKind::additive;
    else config_fail("unknown system '" + s + "' (kubo, oscillator, linear, additive)");
  } else if (key == "a") {
    cfg.kubo.a = to_real(v, key);
  } else if (key == "sigma") {
    cfg.kubo.sigma = cfg.oscillator.sigma = to_real(v, key);
  } else if (key == "x0") {
    cfg.x0 = to_vector(v, key);
  } else if (key == "generators") {
    cfg.generators = to_matrices(v, key);
  } else if (key == "C0") {
    cfg.c0 = to_matrix(v, key);
  } else if (key == "C1") {
    cfg.c1 = to_vectors(v, key);
  } else if (key == "C2") {
    cfg.c2 = to_vectors(v, key);
  } else if (key == "scheme") {
    pending.scheme = to_str(v, key);
  } else if (key == "order") {
    pending.order = to_pair(v, key);
  } else if (key == "ell") {
    pending.ell = to_real(v, key);
  } else if (key == "drift_order") {
    pending.drift_order = to_pair(v, key);
  } else if (key == "kernel_order") {
    pending.kernel_order = to_pair(v, key);
  } else if (key == "grid") {
    cfg.grid = to_reals(v, key);
  } else if (key == "T") {
    cfg.T = to_real(v, key);
  } else if (key == "paths") {
    cfg.paths = to_count(v, key);
  } else if (key == "seed") {
    if (!v.is_number_unsigned()) config_fail("'seed' must be an unsigned 64-bit integer");
    cfg.seed = v.get<std::uint64_t>();
    cfg.seed_explicit = true;
  } else if (key == "record") {
    if (!v.is_array()) config_fail("'record' must be an array of strings");
    cfg.record.hamiltonian = cfg.record.defect = cfg.record.exact = false;
    for (const auto& e : v) {
      const auto s = to_str(e, key);
      if (s == "hamiltonian") cfg.record.hamiltonian = true;
      else if (s == "defect") cfg.record.defect = true;
      else if (s == "exact") cfg.record.exact = true;
      else config_fail("unknown record entry '" + s + "' (hamiltonian, defect, exact)");
    }
  } else if (key == "hamiltonian") {
    cfg.record.hamiltonian_matrix = to_matrix(v, key);
  } else if (key == "quad_nodes") {
    cfg.quad_nodes = to_count(v, key);
  } else if (key == "drop_noisy") {
    cfg.drop_noisy = to_bool(v, key);
  } else if (key == "expect_slope") {
    cfg.check.expect_slope = to_real(v, key);
  } else if (key == "slope_tol") {
    cfg.check.slope_tol = to_real(v, key);
  } else if (key == "max_drift") {
    cfg.check.max_drift = to_real(v, key);
  } else if (key == "min_drift") {
    cfg.check.min_drift = to_real(v, key);
  } else if (key == "max_defect") {
    cfg.check.max_defect = to_real(v, key);
  } else if (key == "min_defect") {
    cfg.check.min_defect = to_real(v, key);
  } else if (key == "max_radius_error") {
    cfg.check.max_radius_error = to_real(v, key);
  } else if (key == "max_exact_error") {
    cfg.check.max_exact_error = to_real(v, key);
  } else if (key == "min_crossings") {
    cfg.check.min_crossings = to_count(v, key);
  } else if (key == "expect_moment_slope") {
    cfg.check.expect_moment_slope = to_real(v, key);
  } else if (key == "moment_rel_tol") {
    cfg.check.moment_rel_tol = to_real(v, key);
  } else if (key == "moment_abs_tol") {
    cfg.check.moment_abs_tol = to_real(v, key);
  } else {
    config_fail("unknown key '" + key + "'");
  }
}

void resolve_scheme(ExperimentConfig& cfg, const PendingScheme& p) {
  if (cfg.is_linear()) {
    if (p.drift_order || p.kernel_order) {
      config_fail("drift_order/kernel_order apply to additive systems; use 'order'");
    }
    LinearSchemeSpec spec = cfg.linear_scheme;
    if (p.scheme) {
      if (*p.scheme == "pade") spec.method = LinearMethod::pade;
      else if (*p.scheme == "euler-maruyama") spec.method = LinearMethod::euler_maruyama;
      else if (*p.scheme == "exact") spec.method = LinearMethod::exact;
      else config_fail("unknown linear scheme '" + *p.scheme + "' (pade, euler-maruyama, exact)");
    }
    if (p.order) {
      spec.order = *p.order;
      spec.ell = p.order->r + p.order->s;
    }
    if (p.ell) spec.ell = *p.ell;
    cfg.linear_scheme = spec;
  } else {
    if (p.order || p.ell) config_fail("order/ell apply to linear systems; use drift_order/kernel_order");
    AdditiveSchemeSpec spec = cfg.additive_scheme;
    if (p.scheme) {
      if (*p.scheme == "integral") spec.variant = AdditiveVariant::integral;
      else if (*p.scheme == "left-rectangle") spec.variant = AdditiveVariant::left_rectangle;
      else if (*p.scheme == "exact") spec.variant = AdditiveVariant::exact;
      else config_fail("unknown additive scheme '" + *p.scheme + "' (integral, left-rectangle, exact)");
    }
    if (p.drift_order) spec.drift_order = *p.drift_order;
    if (p.kernel_order) spec.kernel_order = *p.kernel_order;
    cfg.additive_scheme = spec;
  }
}

// Removes a trailing comment; '#' inside a JSON string is kept.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

int bracket_balance(const std::string& text) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return depth;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::convergence: return "convergence";
    case Command::trajectory: return "trajectory";
    case Command::invariants: return "invariants";
    case Command::moment_growth: return "moment-growth";
  }
  return "unknown";
}

LinearShs ExperimentConfig::linear_system() const {
  if (system == SystemKind::kubo) return make_kubo(kubo);
  if (system != SystemKind::linear) config_fail("system is not linear");
  if (generators.empty()) config_fail("'generators' is required for a linear system");
  return make_linear_shs(generators);
}

AdditiveShs ExperimentConfig::additive_system() const {
  if (system == SystemKind::oscillator) return make_oscillator(oscillator);
  if (system != SystemKind::additive) config_fail("system is not additive");
  if (c0.dim() == 0) config_fail("'C0' is required for an additive system");
  return make_additive_shs(c0, c1, c2);
}

Vector ExperimentConfig::initial_state() const {
  if (x0) return *x0;
  switch (system) {
    case SystemKind::kubo: return kubo_initial_state(kubo);
    case SystemKind::oscillator: return oscillator_initial_state(oscillator);
    default: config_fail("'x0' is required for a custom system");
  }
}

void ExperimentConfig::validate(Command command) const {
  if (grid.empty()) config_fail("'grid' is empty");
  if (!(T > 0.0)) config_fail("'T' must be positive");
  for (const double h : grid) {
    if (!(h > 0.0 && h < 1.0)) config_fail("grid value " + std::to_string(h) + " is outside (0, 1)");
    try {
      (void)step_count(T, h);
    } catch (const Error&) {
      config_fail("T/h is not an integer for h = " + std::to_string(h));
    }
  }
  if (quad_nodes == 0) config_fail("'quad_nodes' must be positive");
  switch (command) {
    case Command::convergence:
      if (grid.size() < 3) config_fail("convergence needs at least three grid values");
      if (paths < 2) config_fail("'paths' must be at least 2");
      break;
    case Command::trajectory:
    case Command::invariants:
      if (grid.size() != 1) config_fail(std::string(to_string(command)) + " needs exactly one grid value");
      break;
    case Command::moment_growth:
      if (is_linear()) config_fail("moment growth needs an additive system");
      if (grid.size() != 1) config_fail("moment growth needs exactly one grid value");
      if (paths < kMinMomentPaths) {
        config_fail("'paths' must be at least " + std::to_string(kMinMomentPaths) + " for moment growth");
      }
      break;
  }
  try {
    std::size_t dim = 0;
    if (is_linear()) {
      linear_scheme.validate();
      const auto sys = linear_system();
      dim = sys.dim();
      if (command == Command::trajectory && record.exact && !sys.commuting()) {
        config_fail("exact trajectory needs commuting generators");
      }
    } else {
      additive_scheme.validate();
      dim = additive_system().dim();
    }
    if (initial_state().dim() != dim) config_fail("'x0' has the wrong dimension");
    if (record.hamiltonian_matrix && record.hamiltonian_matrix->dim() != dim) {
      config_fail("'hamiltonian' has the wrong dimension");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_error) throw;
    config_fail(bare(e));
  }
}

std::vector<BuiltinInfo> builtin_experiments() {
  std::vector<BuiltinInfo> out;
  for (const auto& b : kBuiltins) {
    out.push_back({b.name, b.description});
  }
  return out;
}

ExperimentConfig builtin_config(std::string_view name, Command command) {
  const BuiltinEntry* entry = find_builtin(name);
  if (!entry) config_fail("unknown builtin '" + std::string(name) + "' (see --list)");
  ExperimentConfig cfg = std::string_view(entry->name).starts_with("kubo")
                             ? kubo_builtin(entry->name, command)
                             : oscillator_builtin(*entry, command);
  cfg.name = entry->name;
  cfg.description = entry->description;
  return cfg;
}

ExperimentConfig parse_config(std::string_view text, Command command) {
  ExperimentConfig cfg;
  PendingScheme pending;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool seen_key = false;
  std::map<std::string, std::size_t> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::size_t start_line = line_no;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_fail("line " + std::to_string(start_line) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    while (bracket_balance(value) > 0 && std::getline(in, raw)) {
      ++line_no;
      value += ' ';
      value += trim(strip_comment(raw));
    }
    const auto where = [&] { return "line " + std::to_string(start_line) + ": "; };
    if (key.empty()) config_fail(where() + "missing key");
    if (const auto it = seen.find(key); it != seen.end()) {
      config_fail(where() + "duplicate key '" + key + "' (first on line " +
                  std::to_string(it->second) + ")");
    }
    seen.emplace(key, start_line);
    json v;
    try {
      v = json::parse(value);
    } catch (const json::parse_error& e) {
      config_fail(where() + "cannot parse value of '" + key + "': " + e.what());
    }
    try {
      if (key == "builtin") {
        if (seen_key) config_fail("'builtin' must be the first key");
        const auto name = to_str(v, key);
        cfg = builtin_config(name, command);
      } else {
        apply_key(cfg, pending, key, v);
      }
    } catch (const Error& e) {
      config_fail(where() + bare(e));
    }
    seen_key = true;
  }
  try {
    resolve_scheme(cfg, pending);
  } catch (const Error& e) {
    config_fail("scheme: " + bare(e));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, Command command) {
  std::ifstream file(path);
  if (!file) config_fail("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  try {
    return parse_config(buf.str(), command);
  } catch (const Error& e) {
    config_fail(path.string() + ": " + bare(e));
  }
}

}  // namespace sympade
