#include "ewmaopt/performance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ewmaopt/errors.hpp"

namespace ewmaopt {

std::string_view to_string(DelayMethod method) {
  switch (method) {
    case DelayMethod::Trivial: return "trivial";
    case DelayMethod::ClosedForm: return "closed-form";
    case DelayMethod::Nystrom: return "nystrom";
  }
  return "unknown";
}

SupremumTracker::SupremumTracker(const DelayPolicy& policy) : policy_(policy) {
  if (!(policy.rel_tol > 0.0) || policy.consecutive < 1 || policy.k_max < 1 || policy.min_k < 0) {
    throw std::invalid_argument("DelayPolicy: need rel_tol > 0, consecutive >= 1, k_max >= 1, min_k >= 0");
  }
  policy_.k_max = std::max(policy.k_max, policy.min_k);
}

bool SupremumTracker::record(int k, double add_at_start, double state_max, double state_min) {
  if (!std::isfinite(add_at_start) || !std::isfinite(state_max)) {
    throw NonConvergence("delay sequence became non-finite at k = " + std::to_string(k));
  }
  if (add_at_start > sup_) {
    sup_ = add_at_start;
    argmax_ = k;
  }
  if (!stabilized_ && state_max - state_min <= policy_.rel_tol * std::abs(state_max)) {
    stabilized_ = true;
    plateau_ = add_at_start;
  }
  run_ = state_max <= sup_ * (1.0 + policy_.rel_tol) ? run_ + 1 : 0;
  const bool done = run_ >= policy_.consecutive && k >= policy_.min_k;
  if (!done && k >= policy_.k_max) {
    if (!policy_.k_max_is_error) return true;
    throw NonConvergence("delay sequence did not settle within k_max = " + std::to_string(policy_.k_max));
  }
  return done;
}

}  // namespace ewmaopt
