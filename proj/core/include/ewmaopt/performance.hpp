#pragma once

#include <limits>
#include <string_view>
#include <vector>

namespace ewmaopt {

/// Controls how far the conditional-delay sequence ADD_k is extended when
/// computing SADD = sup_k ADD_k.
///
/// ADD_{k+1}(x) is a weighted average of ADD_k over the states reachable from
/// x, so max_y ADD_k(y) bounds every later ADD_j at any start. The sequence is
/// stopped once that bound stays within rel_tol of the running supremum for
/// `consecutive` steps. The plateau (quasi-stationary delay) is recorded once
/// max_y ADD_k(y) - min_y ADD_k(y) <= rel_tol * ADD_k.
struct DelayPolicy {
  double rel_tol = 1e-6;
  int consecutive = 3;
  int k_max = 5000;
  /// Always compute at least this many terms (figure data wants full curves).
  int min_k = 0;
  /// When false, reaching k_max ends the sequence (sup over k <= k_max)
  /// instead of raising NonConvergence.
  bool k_max_is_error = true;
};

enum class DelayMethod { Trivial, ClosedForm, Nystrom };

std::string_view to_string(DelayMethod method);

/// Operating characteristics of one procedure started from one headstart.
struct PerformanceProfile {
  double arl = 0.0;
  std::vector<double> add;  ///< ADD_k for k = 0..K
  double sadd = 0.0;
  int k_at_sup = 0;
  double psi = 0.0;
  double stadd = 0.0;
  bool degenerate = false;
  bool stabilized = false;  ///< plateau reached before the delay sequence stopped
  double plateau = std::numeric_limits<double>::quiet_NaN();
  DelayMethod delay_method = DelayMethod::Trivial;
};

/// Running supremum of ADD_k with the stop rule described on DelayPolicy.
class SupremumTracker {
 public:
  explicit SupremumTracker(const DelayPolicy& policy);

  /// Feed ADD_k at the headstart and the extremes of ADD_k over the state
  /// grid. Returns true when the sequence may stop after this k. Reaching
  /// k_max without stopping throws NonConvergence unless the policy says
  /// otherwise.
  bool record(int k, double add_at_start, double state_max, double state_min);

  [[nodiscard]] double sup() const noexcept { return sup_; }
  [[nodiscard]] int argmax() const noexcept { return argmax_; }
  [[nodiscard]] bool stabilized() const noexcept { return stabilized_; }
  [[nodiscard]] double plateau() const noexcept { return plateau_; }

 private:
  DelayPolicy policy_;
  double sup_ = -std::numeric_limits<double>::infinity();
  int argmax_ = 0;
  int run_ = 0;
  bool stabilized_ = false;
  double plateau_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace ewmaopt
