#pragma once

// Threshold calibration to a target ARL, (lambda, z) optimization of the
// EWMA chart, and the SR / SR-r benchmarks it is compared against.

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/exp_model.hpp"
#include "ewmaopt/performance.hpp"

namespace ewmaopt {

enum class Objective { Sadd, Stadd };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

struct CalibrationTarget {
  double gamma;
  double rel_tol = 1e-3;

  void validate() const;
};

struct Bracket {
  double lo;
  double hi;
};

/// Finds A with |ARL(A) - gamma| / gamma <= rel_tol for an increasing
/// evaluator. Works on log ARL with a bracketing (Illinois) secant; the
/// bracket is widened by doubling as needed.
double calibrate_threshold(const std::function<double(double)>& arl_of_threshold, const CalibrationTarget& target,
                           Bracket bracket);

/// EWMA threshold with ARL = gamma for the given (lambda, z).
double calibrate_ewma(double lambda, double headstart, const CalibrationTarget& target,
                      const SeriesTruncation& trunc = {});

/// SR-r threshold (closed-form starting bracket, Nystrom ARL).
double calibrate_srr(const ExpChangeModel& statistic_model, double r, const CalibrationTarget& target);

struct OptimizerOptions {
  int lambda_points = 25;
  double lambda_min = 0.005;
  double lambda_max = 1.0;
  int z_points = 15;
  double z_max = 2.0;
  /// Simplex stops when objective spread <= ftol * value and vertex spread
  /// in (lambda, z) <= xtol.
  double ftol = 1e-7;
  double xtol = 1e-4;
  int max_simplex_evals = 400;
  double simplex_lambda_min = 0.001;
  /// Calibration tolerance used inside the search (kept tight so the
  /// objective is smooth in the design parameters).
  double calibration_tol = 1e-9;
  ProfileOptions profile{.trunc = {1e-12, 5000}};
  unsigned threads = 0;
};

struct DesignOptimum {
  double lambda_star = 0.0;
  double z_star = 0.0;
  double A_star = 0.0;
  Objective objective = Objective::Sadd;
  double value = 0.0;
  int evaluations = 0;
  double grid_best = 0.0;
  PerformanceProfile profile;
};

/// Objective at (lambda, z) after calibrating A; returns the design used.
struct DesignPoint {
  EwmaDesign design;
  double value;
  PerformanceProfile profile;
};
DesignPoint evaluate_design(double lambda, double headstart, const ExpChangeModel& model, double gamma,
                            Objective objective, const OptimizerOptions& opts = {});

/// Grid search plus simplex refinement. z_fixed empty means z is optimized.
DesignOptimum optimize_design(const ExpChangeModel& model, const CalibrationTarget& target, Objective objective,
                              std::optional<double> z_fixed, const OptimizerOptions& opts = {});

struct LambdaOptPoint {
  double gamma;
  double lambda_star;
  double A_star;
  double value;
};

std::vector<LambdaOptPoint> lambda_opt_curve(const ExpChangeModel& model, Objective objective,
                                             const std::vector<double>& gamma_grid, double z_fixed,
                                             const OptimizerOptions& opts = {});

/// SR tuned to `statistic_theta`, observations from `data_model`.
struct SrBenchmark {
  double threshold = 0.0;
  double r = 0.0;
  PerformanceProfile profile;
};

/// SR procedure (r = 0) calibrated to gamma; STADD and SADD from Nystrom.
SrBenchmark sr_benchmark(const ExpChangeModel& statistic_model, const ExpChangeModel& data_model, double gamma,
                         bool with_delays = false);
SrBenchmark sr_benchmark(const ExpChangeModel& model, double gamma, bool with_delays = false);

/// SR-r with r chosen to minimize SADD (golden section in log(1 + r), each
/// candidate recalibrated).
SrBenchmark srr_benchmark(const ExpChangeModel& model, double gamma, double r_tol = 1e-3);

struct MisspecCell {
  double gamma;
  double theta_true;
  double ewma_stadd;
  double sr_misdesigned_stadd;
  double sr_optimal_stadd;
  double ewma_ratio;
  double sr_ratio;
};

struct MisspecReport {
  double theta_design;
  double z;
  std::vector<MisspecCell> cells;
};

/// EWMA optimized (STADD) for theta_design and SR designed for theta_design,
/// both evaluated under each theta_true relative to SR tuned to theta_true.
MisspecReport misspecification_study(double theta_design, const std::vector<double>& theta_true_grid,
                                     const std::vector<double>& gamma_grid, double z_fixed,
                                     const OptimizerOptions& opts = {});

}  // namespace ewmaopt
