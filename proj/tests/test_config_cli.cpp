#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <doctest.h>

#include "sympade/config.hpp"
#include "sympade/csv.hpp"
#include "sympade/error.hpp"
#include "sympade/experiment.hpp"

using namespace sympade;

namespace {

std::string config_message(std::string_view text, Command cmd = Command::convergence) {
  try {
    parse_config(text, cmd).validate(cmd);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
    return e.what();
  }
  FAIL("expected config error");
  return {};
}

bool contains(const std::string& s, std::string_view part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("numbers round trip through the CSV format") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324,
                   std::numeric_limits<double>::max()}) {
    const std::string text = format_number(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
  CsvTable t;
  t.header = {"h", "rms_error"};
  t.add_row({0.1, 1.0 / 3.0});
  t.add_row({0.05, 1e-9});
  t.footer = {"seed=7", "check slope PASS"};
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
  const std::string text = t.render();
  CHECK(contains(text, "# seed=7\n"));
  const CsvTable back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.footer == t.footer);
  CHECK(back.render() == text);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n3\n"), Error);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), Error);
}

TEST_CASE("builtins list and aliases") {
  const auto list = builtin_experiments();
  CHECK(list.size() >= 9);
  for (const auto& b : list) CHECK_FALSE(b.description.empty());
  const auto a = builtin_config("oscillator-integral", Command::convergence);
  const auto b = builtin_config("oscillator-5.8", Command::convergence);
  CHECK(a.grid == b.grid);
  CHECK(a.paths == b.paths);
  CHECK(builtin_config("oscillator-5.9", Command::convergence).additive_scheme.variant ==
        AdditiveVariant::left_rectangle);
  CHECK_THROWS_AS(builtin_config("nope", Command::convergence), Error);
  CHECK_THROWS_AS(builtin_config("kubo-(1,1)", Command::moment_growth), Error);
}

TEST_CASE("every builtin validates for the commands it supports") {
  for (const auto& b : builtin_experiments()) {
    for (Command c : {Command::convergence, Command::trajectory, Command::invariants,
                      Command::moment_growth}) {
      try {
        builtin_config(b.name, c).validate(c);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config_error);
        const bool noiseless = b.name == "oscillator-sigma0" && c == Command::convergence;
        CHECK((c == Command::moment_growth || noiseless));
      }
    }
  }
}

TEST_CASE("parse a custom linear config") {
  const auto cfg = parse_config(R"(
# two channels
system = "linear"
generators = [[[0, -1], [1, 0]],
              [[0, -0.5], [0.5, 0]]]
x0 = [1, 0]
scheme = "pade"
order = [2, 2]
grid = [0.1, 0.05, 0.025]
T = 1
paths = 50
seed = 9
)",
                                Command::convergence);
  CHECK(cfg.system == SystemKind::linear);
  REQUIRE(cfg.generators.size() == 2);
  CHECK(cfg.linear_scheme.order.r == 2);
  CHECK(cfg.linear_scheme.ell == 4.0);
  CHECK(cfg.seed == 9);
  CHECK(cfg.seed_explicit);
  CHECK_NOTHROW(cfg.validate(Command::convergence));
  CHECK(cfg.linear_system().channels() == 1);
}

TEST_CASE("parse a custom additive config and run moment growth") {
  const auto cfg = parse_config(R"(
system = "additive"
C0 = [[1, 0], [0, 1]]
C1 = [[0]]
C2 = [[0.3]]
x0 = [0, 1]
scheme = "integral"
grid = [0.1]
T = 1
paths = 100
)",
                                Command::moment_growth);
  CHECK_FALSE(cfg.seed_explicit);
  CHECK(cfg.seed == kDefaultSeed);
  const auto result = run_moment_growth(cfg);
  CHECK(result.table.header == std::vector<std::string>{"t", "second_moment"});
  CHECK(result.table.rows.size() == 11);
}

TEST_CASE("builtin key seeds the remaining fields") {
  const auto cfg = parse_config("builtin = \"kubo-(2,2)\"\npaths = 10\n", Command::convergence);
  CHECK(cfg.paths == 10);
  CHECK(cfg.linear_scheme.order.r == 2);
  CHECK(contains(config_message("paths = 10\nbuiltin = \"kubo-(2,2)\"\n"), "line 2"));
}

TEST_CASE("config errors name the line") {
  CHECK(contains(config_message("T = 1\nbogus = 3\n"), "line 2"));
  CHECK(contains(config_message("T = 1\nT = 2\n"), "line 2"));
  CHECK(contains(config_message("T = [1,\n"), "line 1"));
  CHECK(contains(config_message("grid = \"x\"\n"), "line 1"));
  CHECK(contains(config_message("scheme = \"rk4\"\n"), "scheme"));
  CHECK(contains(config_message("no equals sign\n"), "line 1"));
}

TEST_CASE("config validation") {
  config_message("grid = []\n");
  config_message("grid = [0.1, 0.05, 1.5]\n");
  config_message("grid = [0.3, 0.1, 0.05]\n");
  config_message("grid = [0.1, 0.05]\n");
  config_message("grid = [0.1, 0.05, 0.025]\npaths = 1\n");
  config_message("grid = [0.1, 0.05]\n", Command::trajectory);
  config_message("system = \"kubo\"\ngrid = [0.1]\npaths = 200\n", Command::moment_growth);
  config_message("system = \"oscillator\"\ngrid = [0.1]\npaths = 20\n", Command::moment_growth);
  config_message("system = \"linear\"\ngenerators = [[[1, 0], [0, 1]]]\ngrid = [0.1, 0.05, 0.025]\n");
  config_message("x0 = [1, 0, 0]\ngrid = [0.1, 0.05, 0.025]\n");
}

TEST_CASE("Command names") {
  CHECK(to_string(Command::moment_growth) == "moment-growth");
  CHECK(to_string(Command::convergence) == "convergence");
}

TEST_CASE("runner output is reproducible and carries metadata") {
  auto cfg = builtin_config("kubo-(1,1)", Command::convergence);
  cfg.paths = 20;
  cfg.T = 1.0;
  cfg.grid = {0.1, 0.05, 0.025};
  cfg.check = {};
  RunOptions one, three;
  three.workers = 3;
  const auto a = run_convergence(cfg, one).table.render();
  const auto b = run_convergence(cfg, three).table.render();
  CHECK(a == b);
  CHECK(contains(a, "# seed=20240917"));
  CHECK(contains(a, "h,rms_error,stderr\n"));

  auto traj = builtin_config("kubo-(2,2)", Command::trajectory);
  traj.T = 1.0;
  const auto t = run_trajectory(traj).table;
  CHECK(t.rows.size() == 51);
  CHECK(t.header.front() == "t");
}

TEST_CASE("check outcomes render one line each") {
  const CheckOutcome c{"slope", 1.98, 2.0, true};
  const std::string line = c.describe();
  CHECK(line.rfind("check slope", 0) == 0);
  CHECK(contains(line, "PASS"));
  ExperimentResult r;
  r.checks = {c, CheckOutcome{"drift", 1.0, 0.5, false}};
  CHECK_FALSE(r.passed());
}
