#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ewmaopt/exp_model.hpp"

using namespace ewmaopt;

TEST_CASE("exponential densities and tails") {
  const ExpChangeModel m(1.0);
  CHECK(m.mean(Regime::PreChange) == 1.0);
  CHECK(m.mean(Regime::PostChange) == 2.0);
  CHECK(m.density(Regime::PreChange, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(m.density(Regime::PostChange, 1.0) == doctest::Approx(0.5 * std::exp(-0.5)));
  CHECK(m.cdf(Regime::PostChange, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(m.survival(Regime::PreChange, 700.0) == doctest::Approx(std::exp(-700.0)).epsilon(1e-12));
  CHECK(m.density(Regime::PreChange, -1.0) == 0.0);
}

TEST_CASE("likelihood ratio") {
  const ExpChangeModel m(0.5);
  for (double x : {0.0, 0.3, 2.0, 7.5}) {
    CHECK(m.likelihood_ratio(x) ==
          doctest::Approx(m.density(Regime::PostChange, x) / m.density(Regime::PreChange, x)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(static_cast<void>(m.likelihood_ratio(-0.1)), std::invalid_argument);
  CHECK_THROWS_AS(ExpChangeModel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ExpChangeModel(-1.0), std::invalid_argument);
}

TEST_CASE("likelihood_ratio_cdf agrees with the empirical cdf (KS)") {
  const ExpChangeModel m(1.0);
  for (Regime regime : {Regime::PreChange, Regime::PostChange}) {
    Xoshiro256ss rng(99);
    const int n = 20000;
    std::vector<double> lr(n);
    for (double& v : lr) v = m.likelihood_ratio(m.sample(regime, rng));
    std::sort(lr.begin(), lr.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = m.likelihood_ratio_cdf(regime, lr[i]);
      d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    // 1.63 / sqrt(n) is the 1% critical value
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
  }
  CHECK(m.likelihood_ratio_cdf(Regime::PreChange, 0.4) == 0.0);
}

TEST_CASE("sample mean matches the regime mean") {
  const ExpChangeModel m(2.0);
  Xoshiro256ss rng(5);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += m.sample(Regime::PostChange, rng);
  // SE = 3 / sqrt(n)
  CHECK(std::abs(s / n - 3.0) < 4.0 * 3.0 / std::sqrt(static_cast<double>(n)));
}
