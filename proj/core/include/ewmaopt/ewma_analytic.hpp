#pragma once

// Closed-form operating characteristics of the EWMA chart
//   Z_n = (1 - lambda) Z_{n-1} + lambda X_n,  Z_0 = z,  stop when Z_n >= A
// for exponential observations.

#include <vector>

#include "ewmaopt/exp_model.hpp"
#include "ewmaopt/performance.hpp"
#include "ewmaopt/q_series.hpp"

namespace ewmaopt {

/// One EWMA design (lambda, headstart z, threshold A).
struct EwmaDesign {
  double lambda;
  double headstart;
  double threshold;

  /// Validates 0 < lambda <= 1, z >= 0, A > 0.
  EwmaDesign(double lambda, double headstart, double threshold);

  [[nodiscard]] double alpha() const noexcept { return 1.0 - lambda; }
  /// alpha * z >= A: the first observation always crosses the threshold.
  [[nodiscard]] bool degenerate() const noexcept { return alpha() * headstart >= threshold; }
};

/// ARL to false alarm, E_inf[T].
double arl(const EwmaDesign& design, const SeriesTruncation& trunc = {});
/// Delay when the change is in force from the start, E_0[T].
double add0(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc = {});
/// Integral delay sum_k E_k[(T - k)^+] (change at each k, weighted uniformly).
double psi(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc = {});
/// Stationary average delay psi / ARL.
double stadd(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc = {});

/// Power-series representation f(z) = sum_n B_n z^n / n! of a function on
/// [0, A / alpha] in scaled form: scaled[n] = B_n lambda^n, so
/// f(z) = sum_n scaled[n] (z / lambda)^n / n!.
struct SeriesCoefficients {
  int order = 0;  ///< k for delta_k / rho_k
  double lambda = 1.0;
  std::vector<double> scaled;

  [[nodiscard]] double b0() const { return scaled.at(0); }
  /// Unscaled B_n; overflows for large n when lambda is small.
  [[nodiscard]] double coefficient(int n) const;
  [[nodiscard]] double evaluate(double z) const;
};

/// Number of scaled coefficients needed so that the Poisson(A / lambda)
/// average in the recursion is accurate to double precision.
int coefficient_count(const EwmaDesign& design);

/// Coefficients of the ARL function (ADD_0 with theta -> 0).
SeriesCoefficients arl_coeffs(const EwmaDesign& design, const SeriesTruncation& trunc = {});
/// Coefficients of ADD_0 (k = 0).
SeriesCoefficients add0_coeffs(const EwmaDesign& design, const ExpChangeModel& model,
                               const SeriesTruncation& trunc = {});
/// Coefficients of the constant function `value` (k = 0 seed for rho_k).
SeriesCoefficients constant_coeffs(const EwmaDesign& design, double value = 1.0);

/// One step g -> K_inf g of the pre-change operator, in coefficient space:
/// maps delta_k to delta_{k+1} (and rho_k to rho_{k+1}). Throws
/// CancellationDetected when the result violates g(A / alpha) = 0 by more
/// than boundary_tol * |g(0)|.
SeriesCoefficients delta_k_coeffs(const SeriesCoefficients& previous, const EwmaDesign& design,
                                  double boundary_tol = 1e-8);

/// Toeplitz system for the survival probabilities
/// rho_k(z) = P_inf(T > k | Z_0 = z).
struct SurvivalSystem {
  int k = 0;
  std::vector<double> toeplitz_column;  ///< h_1(A), ..., h_{k-1}(A)
  std::vector<double> c;                ///< c_1, ..., c_k
};

SurvivalSystem survival_coeffs(const EwmaDesign& design, int k);
/// rho_k at z using a solved system (system.k == k).
double rho_k(const EwmaDesign& design, const SurvivalSystem& system, double z);
/// rho_k at the design's headstart.
double rho_k(const EwmaDesign& design, int k);

/// How SADD is computed.
struct ProfileOptions {
  SeriesTruncation trunc{};
  DelayPolicy delay{};
  /// Use the coefficient recursion for ADD_k when lambda >= this value;
  /// otherwise (or when the boundary check fails) iterate a Nystrom grid.
  double closed_form_min_lambda = 0.05;
  double boundary_tol = 1e-8;
  /// Panels (of 10 nodes) for the Nystrom fallback.
  int nystrom_panels = 20;
  bool compute_delays = true;
};

/// ARL, ADD_0, psi, STADD and (optionally) the ADD_k curve with its supremum.
PerformanceProfile profile(const EwmaDesign& design, const ExpChangeModel& model, const ProfileOptions& opts = {});

struct SaddResult {
  double sadd = 0.0;
  int k_at_sup = 0;
  std::vector<double> add;
  bool stabilized = false;
  DelayMethod method = DelayMethod::Trivial;
};

/// SADD = sup_k ADD_k at the design's headstart.
SaddResult sadd(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc = {},
                const DelayPolicy& policy = {});

}  // namespace ewmaopt
