#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ewmaopt_cli/commands.hpp"
#include "ewmaopt_cli/config.hpp"
#include "ewmaopt_cli/csv.hpp"

using namespace ewmaopt::cli;
namespace fs = std::filesystem;

namespace {

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "ewmaopt");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ewmaopt_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double cell(const CsvTable& t, std::size_t row, const std::string& column) {
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c] == column) return std::stod(t.rows.at(row).at(c));
  }
  FAIL("no column " << column);
  return 0.0;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(fmt(7.4851234) == "7.48512");
  CHECK(fmt(1e-7) == "1e-07");
  CHECK(fmt(std::nan("")) == "nan");
}

TEST_CASE("defaults, config file and flags layer in order") {
  RunConfig cfg;
  CHECK(cfg.get("theta") == "1");
  CHECK(cfg.get("seed") == "20240611");
  cfg.load_text("# comment\ntheta = 0.5\n#@ gamma = 100\nversion = 9\n");
  CHECK(cfg.number("theta") == 0.5);
  CHECK(cfg.number("gamma") == 100.0);
  cfg.set("theta", "2");
  CHECK(cfg.number("theta") == 2.0);
  CHECK_THROWS_AS(cfg.set("bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.load_text("nope = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(cfg.set("method", "guess"), std::invalid_argument);

  const auto dir = scratch("precedence");
  std::ofstream(dir / "run.cfg") << "lambda = 1\nA = 2\ngamma = 5\n";
  REQUIRE(run_args({"evaluate", "--config", (dir / "run.cfg").string(), "--A", "1", "--out", dir.string()}) == 0);
  const auto text = slurp(dir / "evaluate.csv");
  CHECK(text.find("#@ A = 1\n") != std::string::npos);
  CHECK(text.find("#@ lambda = 1\n") != std::string::npos);
  CHECK(text.find("ARL,,analytic," + fmt(std::exp(1.0))) != std::string::npos);
}

TEST_CASE("evaluate with lambda = 1") {
  RunConfig cfg;
  cfg.load_text("command = evaluate\nlambda = 1\nA = 2\ntheta = 1\nmethod = all\nreps = 20000\n");
  const auto res = execute(cfg);
  REQUIRE(res.tables.size() == 1);
  const auto& t = res.tables[0];
  CHECK(res.exit_code == 0);
  CHECK(cell(t, 0, "value") == doctest::Approx(std::exp(2.0)).epsilon(1e-5));
  bool saw_mc = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i][2] == "mc" && t.rows[i][0] == "ARL") {
      saw_mc = true;
      CHECK(std::abs(cell(t, i, "value") - std::exp(2.0)) < 3.0 * cell(t, i, "std_error"));
    }
  }
  CHECK(saw_mc);
}

TEST_CASE("calibrate and optimize") {
  RunConfig cfg;
  cfg.load_text("command = calibrate\nlambda = 0.275\nz = 0\ngamma = 100\n");
  const auto cal = execute(cfg);
  CHECK(cell(cal.tables[0], 0, "A") == doctest::Approx(2.07).epsilon(0.005));

  RunConfig opt;
  opt.load_text("command = optimize\ntheta = 1\ngamma = 100\nobjective = stadd\nz = free\n");
  const auto o = execute(opt);
  CHECK(cell(o.tables[0], 0, "value") == doctest::Approx(7.49).epsilon(0.01));
}

TEST_CASE("simulate output is byte-identical for a fixed seed and round-trips") {
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  const std::vector<std::string> args{"simulate", "--proc",  "ewma", "--lambda", "1",    "--A",
                                      "2",        "--metric", "arl", "--reps",   "5000", "--seed", "17"};
  auto args_a = args;
  args_a.insert(args_a.end(), {"--out", a.string(), "--threads", "1"});
  auto args_b = args;
  args_b.insert(args_b.end(), {"--out", b.string(), "--threads", "3"});
  REQUIRE(run_args(args_a) == 0);
  REQUIRE(run_args(args_b) == 0);
  const auto first = slurp(a / "simulate.csv");
  CHECK(first == slurp(b / "simulate.csv"));

  const auto c = scratch("sim_c");
  REQUIRE(run_args({"--config", (a / "simulate.csv").string(), "--out", c.string()}) == 0);
  CHECK(slurp(c / "simulate.csv") == first);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_args({"evaluate", "--lambda", "0", "--A", "1", "--out", dir.string()}) == kInvalidArguments);
  CHECK(run_args({"evaluate", "--objective", "median", "--out", dir.string()}) == kInvalidArguments);
  CHECK(run_args({"frobnicate", "--out", dir.string()}) == kInvalidArguments);
  CHECK(run_args({"evaluate", "--no-such-flag", "1"}) == kInvalidArguments);
  CHECK(run_args({"table", "9z", "--out", dir.string()}) == kInvalidArguments);
  // the threshold is out of reach: the bracket cannot be widened enough
  CHECK(run_args({"calibrate", "--gamma", "1e300", "--lambda", "0.5", "--out", dir.string()}) == kNumericalFailure);
}
