#pragma once

#include <cstdint>
#include <string_view>

#include "ewmaopt/random.hpp"

namespace ewmaopt {

/// Which measure generates the observations: no change (P_inf) or the
/// post-change measure (P_0).
enum class Regime { PreChange, PostChange };

std::string_view to_string(Regime regime);

/// Exponential change-point model: pre-change observations are Exp(1),
/// post-change observations are exponential with mean 1 + theta.
class ExpChangeModel {
 public:
  explicit ExpChangeModel(double theta);

  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] double mean(Regime regime) const noexcept {
    return regime == Regime::PreChange ? 1.0 : 1.0 + theta_;
  }

  [[nodiscard]] double density(Regime regime, double x) const noexcept;
  [[nodiscard]] double cdf(Regime regime, double x) const noexcept;
  /// P(X > x); exact in the far tail where 1 - cdf would round to zero.
  [[nodiscard]] double survival(Regime regime, double x) const noexcept;

  /// g(x)/f(x). Observations are nonnegative, so x < 0 is rejected.
  [[nodiscard]] double likelihood_ratio(double x) const;

  /// P(likelihood_ratio(X) <= t) with X drawn under `regime`.
  [[nodiscard]] double likelihood_ratio_cdf(Regime regime, double t) const noexcept;

  /// Inverse-CDF draw: -mean * ln(U), U uniform on (0, 1].
  [[nodiscard]] double sample(Regime regime, Xoshiro256ss& rng) const noexcept;

 private:
  double theta_;
};

}  // namespace ewmaopt
