#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ewmaopt/design_optimizer.hpp"
#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/errors.hpp"
#include "ewmaopt_cli/tables.hpp"

namespace ewmaopt::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  g.back() = hi;
  return g;
}

std::vector<double> decades(double from, double to, double step) {
  std::vector<double> g;
  for (double e = from; e <= to + 1e-9; e += step) g.push_back(std::pow(10.0, e));
  return g;
}

// ADD_k against k for several headstarts.
CsvTable figure1(const RunConfig& cfg) {
  const ExpChangeModel model(cfg.number("theta"));
  const double gamma = cfg.number("gamma");
  constexpr int k_last = 100;
  CsvTable t{"figure_1", {"panel", "lambda", "z", "A", "k", "add"}, {}};
  struct Curve {
    const char* panel;
    double lambda;
    double z;
  };
  const Curve curves[] = {{"a", 0.2, 0.0}, {"a", 0.2, 0.5}, {"a", 0.2, 1.0}, {"a", 0.2, 1.5}, {"a", 0.2, 2.0},
                          {"b", 0.1, 1.0}};
  for (const auto& c : curves) {
    const double a = calibrate_ewma(c.lambda, c.z, {gamma, 1e-9});
    ProfileOptions po;
    po.delay.min_k = k_last;
    const PerformanceProfile p = profile(EwmaDesign(c.lambda, c.z, a), model, po);
    for (int k = 0; k <= k_last && k < static_cast<int>(p.add.size()); ++k) {
      t.add({c.panel, fmt(c.lambda), fmt(c.z), fmt(a), std::to_string(k), fmt(p.add[static_cast<std::size_t>(k)])});
    }
  }
  return t;
}

// SADD (k <= 150) and STADD over a (lambda, z) grid.
CsvTable figure2(const RunConfig& cfg) {
  const ExpChangeModel model(cfg.number("theta"));
  const double gamma = cfg.number("gamma");
  CsvTable t{"figure_2", {"lambda", "z", "A", "sadd", "stadd"}, {}};
  OptimizerOptions opts;
  opts.profile.delay.k_max = 150;
  opts.profile.delay.k_max_is_error = false;
  for (double lambda : log_grid(0.01, 1.0, 16)) {
    for (int j = 0; j <= 10; ++j) {
      const double z = 0.2 * j;
      try {
        const DesignPoint p = evaluate_design(lambda, z, model, gamma, Objective::Sadd, opts);
        t.add({fmt(lambda), fmt(z), fmt(p.design.threshold), fmt(p.profile.sadd), fmt(p.profile.stadd)});
      } catch (const NumericalError&) {
        // no threshold reaches gamma from this headstart
        t.add({fmt(lambda), fmt(z), fmt(kNaN), fmt(kNaN), fmt(kNaN)});
      }
    }
  }
  return t;
}

// Relative loss against the optimal lambda at z = 1.
CsvTable figure3(const RunConfig& cfg) {
  const ExpChangeModel model(cfg.number("theta"));
  const double gamma = cfg.number("gamma");
  CsvTable t{"figure_3", {"objective", "lambda", "A", "value", "loss", "optimum"}, {}};
  for (Objective obj : {Objective::Sadd, Objective::Stadd}) {
    const DesignOptimum best = optimize_design(model, {gamma}, obj, 1.0);
    auto lambdas = log_grid(0.01, 1.0, 25);
    for (double lambda : lambdas) {
      const DesignPoint p = evaluate_design(lambda, 1.0, model, gamma, obj);
      t.add({std::string(to_string(obj)), fmt(lambda), fmt(p.design.threshold), fmt(p.value),
             fmt(p.value / best.value - 1.0), "0"});
    }
    t.add({std::string(to_string(obj)), fmt(best.lambda_star), fmt(best.A_star), fmt(best.value), fmt(0.0), "1"});
  }
  return t;
}

// STADD over (lambda, gamma) and the optimal lambda as a function of gamma.
std::vector<CsvTable> figure4(const RunConfig&) {
  CsvTable surface{"figure_4a", {"theta", "gamma", "lambda", "A", "stadd"}, {}};
  const ExpChangeModel unit(1.0);
  for (double gamma : decades(2.0, 4.0, 0.5)) {
    for (double lambda : log_grid(0.005, 1.0, 20)) {
      const DesignPoint p = evaluate_design(lambda, 1.0, unit, gamma, Objective::Stadd);
      surface.add({fmt(1.0), fmt(gamma), fmt(lambda), fmt(p.design.threshold), fmt(p.value)});
    }
  }
  CsvTable curve{"figure_4b", {"theta", "gamma", "lambda_star", "A_star", "stadd"}, {}};
  for (double theta : {0.5, 1.0, 2.0}) {
    for (const auto& pt : lambda_opt_curve(ExpChangeModel(theta), Objective::Stadd, decades(2.0, 4.0, 0.25), 1.0)) {
      curve.add({fmt(theta), fmt(pt.gamma), fmt(pt.lambda_star), fmt(pt.A_star), fmt(pt.value)});
    }
  }
  return {surface, curve};
}

// Loss ratios when the design assumes theta = 0.5.
CsvTable figure5(const RunConfig&) {
  CsvTable t{"figure_5",
             {"gamma", "theta_true", "ewma_stadd", "sr_design_stadd", "sr_optimal_stadd", "ewma_ratio", "sr_ratio"},
             {}};
  const MisspecReport r = misspecification_study(0.5, {0.5, 1.0, 2.0}, decades(2.0, 4.0, 0.5), 1.0);
  for (const auto& c : r.cells) {
    t.add({fmt(c.gamma), fmt(c.theta_true), fmt(c.ewma_stadd), fmt(c.sr_misdesigned_stadd), fmt(c.sr_optimal_stadd),
           fmt(c.ewma_ratio), fmt(c.sr_ratio)});
  }
  return t;
}

}  // namespace

std::vector<CsvTable> compute_figure(int id, const RunConfig& config) {
  switch (id) {
    case 1: return {figure1(config)};
    case 2: return {figure2(config)};
    case 3: return {figure3(config)};
    case 4: return figure4(config);
    case 5: return {figure5(config)};
    default: throw std::invalid_argument("unknown figure " + std::to_string(id) + " (expected 1..5)");
  }
}

}  // namespace ewmaopt::cli
