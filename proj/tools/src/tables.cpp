#include "ewmaopt_cli/tables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ewmaopt/errors.hpp"

namespace ewmaopt::cli {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TableSpec table_spec(std::string_view id) {
  if (id == "1a") return {"1a", 0.5, Objective::Sadd};
  if (id == "1b") return {"1b", 0.5, Objective::Stadd};
  if (id == "2a") return {"2a", 1.0, Objective::Sadd};
  if (id == "2b") return {"2b", 1.0, Objective::Stadd};
  throw std::invalid_argument("unknown table '" + std::string(id) + "' (expected 1a, 1b, 2a or 2b)");
}

std::vector<TableCell> compute_table(std::string_view id, const OptimizerOptions& opts) {
  const TableSpec spec = table_spec(id);
  const ExpChangeModel model(spec.theta);
  const std::string metric = spec.objective == Objective::Sadd ? "SADD" : "STADD";
  std::vector<TableCell> cells;
  const std::pair<const char*, std::optional<double>> modes[] = {{"0", 0.0}, {"1", 1.0}, {"opt", std::nullopt}};
  for (const auto& [mode, z] : modes) {
    for (double gamma : table_gammas()) {
      TableCell c{"EWMA", mode, gamma, metric, kNaN, kNaN, kNaN, kNaN, kNaN, ""};
      try {
        const DesignOptimum o = optimize_design(model, {gamma}, spec.objective, z, opts);
        c.value = o.value;
        c.A = o.A_star;
        c.lambda = o.lambda_star;
        c.z = o.z_star;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
      cells.push_back(c);
    }
  }
  for (double gamma : table_gammas()) {
    const bool minimax = spec.objective == Objective::Sadd;
    TableCell c{minimax ? "SR-r" : "SR", "", gamma, metric, kNaN, kNaN, kNaN, kNaN, kNaN, ""};
    try {
      const SrBenchmark b = minimax ? srr_benchmark(model, gamma) : sr_benchmark(model, gamma);
      c.value = minimax ? b.profile.sadd : b.profile.stadd;
      c.A = b.threshold;
      c.r = b.r;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    cells.push_back(c);
  }
  return cells;
}

CsvTable table_csv(std::string_view id, const std::vector<TableCell>& cells) {
  CsvTable t;
  t.name = "table_" + std::string(id);
  t.header = {"procedure", "z_mode", "gamma", "metric", "value", "A", "lambda", "z", "r", "error"};
  for (const auto& c : cells) {
    t.add({c.procedure, c.z_mode, fmt(c.gamma), c.metric, fmt(c.value), fmt(c.A), fmt(c.lambda), fmt(c.z), fmt(c.r),
           c.error});
  }
  return t;
}

}  // namespace ewmaopt::cli
