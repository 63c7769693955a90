#include "ewmaopt/exp_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ewmaopt {

std::string_view to_string(Regime regime) {
  return regime == Regime::PreChange ? "pre-change" : "post-change";
}

ExpChangeModel::ExpChangeModel(double theta) : theta_(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("ExpChangeModel: theta must be positive, got " + std::to_string(theta));
  }
}

double ExpChangeModel::density(Regime regime, double x) const noexcept {
  if (x < 0.0) return 0.0;
  const double m = mean(regime);
  return std::exp(-x / m) / m;
}

double ExpChangeModel::cdf(Regime regime, double x) const noexcept {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-x / mean(regime));
}

double ExpChangeModel::survival(Regime regime, double x) const noexcept {
  if (x <= 0.0) return 1.0;
  return std::exp(-x / mean(regime));
}

double ExpChangeModel::likelihood_ratio(double x) const {
  if (x < 0.0) {
    throw std::invalid_argument("likelihood_ratio: observations are nonnegative, got " + std::to_string(x));
  }
  return std::exp(x * theta_ / (1.0 + theta_)) / (1.0 + theta_);
}

double ExpChangeModel::likelihood_ratio_cdf(Regime regime, double t) const noexcept {
  const double floor = 1.0 / (1.0 + theta_);
  if (t <= floor) return 0.0;
  const double kappa = (1.0 + theta_) / (theta_ * mean(regime));
  return -std::expm1(-kappa * std::log(t / floor));
}

double ExpChangeModel::sample(Regime regime, Xoshiro256ss& rng) const noexcept {
  return -mean(regime) * std::log(rng.uniform_open0());
}

}  // namespace ewmaopt
