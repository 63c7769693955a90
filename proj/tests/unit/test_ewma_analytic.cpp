#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ewmaopt/design_optimizer.hpp"
#include "ewmaopt/errors.hpp"
#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/oc_fredholm.hpp"

using namespace ewmaopt;

namespace {

OcSolution nystrom(const EwmaDesign& d, const ExpChangeModel& m) {
  return solve_iadd(ewma_kernel(m, d.lambda, d.threshold), Quadrature::uniform(d.threshold, 20, 10));
}

}  // namespace

TEST_CASE("design validation") {
  CHECK_THROWS_AS(EwmaDesign(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EwmaDesign(1.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EwmaDesign(0.5, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EwmaDesign(0.5, 0.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(EwmaDesign(1.0, 0.0, 1.0));
}

TEST_CASE("lambda = 1 reduces to geometric run lengths") {
  for (double A : {0.5, 1.0, 2.0, 3.0}) {
    for (double theta : {0.5, 1.0, 2.0}) {
      const EwmaDesign d(1.0, 0.7, A);
      const ExpChangeModel m(theta);
      const double post = std::exp(A / (1.0 + theta));
      CHECK(arl(d) == doctest::Approx(std::exp(A)).epsilon(1e-12));
      CHECK(add0(d, m) == doctest::Approx(post).epsilon(1e-12));
      CHECK(stadd(d, m) == doctest::Approx(post).epsilon(1e-12));
      CHECK(psi(d, m) == doctest::Approx(std::exp(A) * post).epsilon(1e-12));
      for (int k : {1, 2, 5}) {
        CHECK(rho_k(d, k) == doctest::Approx(std::pow(1.0 - std::exp(-A), k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("degenerate design is detected immediately") {
  const EwmaDesign d(0.2, 2.0, 1.5);  // 0.8 * 2 >= 1.5
  const ExpChangeModel m(1.0);
  CHECK(d.degenerate());
  CHECK(arl(d) == 1.0);
  CHECK(add0(d, m) == 1.0);
  CHECK(stadd(d, m) == 1.0);
  const auto p = profile(d, m);
  CHECK(p.degenerate);
  CHECK(p.sadd == 1.0);
}

TEST_CASE("closed forms agree with the Nystrom solver") {
  const ExpChangeModel m(0.5);
  for (double lambda : {0.1, 0.3, 0.7}) {
    for (double z : {0.0, 0.6, 1.2}) {
      const EwmaDesign d(lambda, z, 1.4);
      const auto sol = nystrom(d, m);
      CHECK(arl(d) == doctest::Approx(sol.arl_at(z)).epsilon(1e-8));
      CHECK(add0(d, m) == doctest::Approx(sol.add0_at(z)).epsilon(1e-8));
      CHECK(psi(d, m) == doctest::Approx(sol.iadd_at(z)).epsilon(1e-8));
    }
  }
}

TEST_CASE("coefficient series reproduce the closed forms") {
  const ExpChangeModel m(1.0);
  const EwmaDesign base(0.25, 0.0, 1.6);
  const auto a = arl_coeffs(base);
  const auto b = add0_coeffs(base, m);
  for (double z : {0.0, 0.5, 1.0, 1.9}) {
    const EwmaDesign d(0.25, z, 1.6);
    CHECK(a.evaluate(z) == doctest::Approx(arl(d)).epsilon(1e-10));
    CHECK(b.evaluate(z) == doctest::Approx(add0(d, m)).epsilon(1e-10));
  }
  CHECK(a.b0() == a.scaled[0]);
  CHECK(a.coefficient(3) == doctest::Approx(a.scaled[3] / std::pow(0.25, 3)).epsilon(1e-14));
  CHECK(constant_coeffs(base, 2.5).evaluate(0.9) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("survival probabilities: Toeplitz, recursion and Nystrom agree") {
  const EwmaDesign d(1.0, 0.0, 1.0);
  const auto sys1 = survival_coeffs(d, 2);
  REQUIRE(sys1.c.size() == 2);
  CHECK(sys1.c[0] == 1.0);
  CHECK(sys1.c[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

  const ExpChangeModel m(1.0);
  const EwmaDesign e(0.3, 0.4, 1.5);
  const auto sol = nystrom(e, m);
  const auto curve = iterate_rho_delta(sol, e.headstart, {.k_max = 12, .min_k = 12, .k_max_is_error = false});
  auto g = constant_coeffs(e);
  double prev = 1.0;
  for (int k = 1; k <= 12; ++k) {
    g = delta_k_coeffs(g, e);
    const double toeplitz = rho_k(e, k);
    CHECK(toeplitz == doctest::Approx(g.evaluate(e.headstart)).epsilon(1e-11));
    CHECK(toeplitz == doctest::Approx(curve.rho[static_cast<std::size_t>(k)]).epsilon(1e-9));
    CHECK(toeplitz <= prev + 1e-15);
    CHECK(toeplitz >= 0.0);
    prev = toeplitz;
  }
}

TEST_CASE("delta_k boundary condition holds for moderate lambda") {
  const ExpChangeModel m(0.5);
  for (double lambda : {0.1, 0.3, 0.8}) {
    const EwmaDesign d(lambda, 0.0, 1.5);
    auto g = add0_coeffs(d, m);
    for (int k = 1; k <= 20; ++k) {
      g = delta_k_coeffs(g, d);
      CHECK(std::abs(g.evaluate(1.5 / d.alpha())) <= 1e-8 * g.evaluate(0.0));
    }
  }
}

TEST_CASE("delta_k recursion reports cancellation at small lambda") {
  const ExpChangeModel m(0.5);
  const EwmaDesign d(0.05, 0.0, 1.5);
  const auto g = add0_coeffs(d, m);
  CHECK_THROWS_AS(delta_k_coeffs(g, d), CancellationDetected);
  // profile falls back to the grid instead
  const auto p = profile(d, m);
  CHECK(p.delay_method == DelayMethod::Nystrom);
  CHECK(p.sadd >= p.add.front());
}

TEST_CASE("integral delay equals the sum of delta_k") {
  const ExpChangeModel m(1.0);
  const EwmaDesign d(0.4, 0.5, 1.2);
  auto g = add0_coeffs(EwmaDesign(0.4, 0.0, 1.2), m);
  double total = g.evaluate(0.5);
  auto rho = constant_coeffs(d);
  double last = total;
  int k = 0;
  while (last > 1e-14 * total && k < 2000) {
    g = delta_k_coeffs(g, d);
    rho = delta_k_coeffs(rho, d);
    last = g.evaluate(0.5);
    total += last;
    ++k;
  }
  // delta_k <= rho_k * max ADD; rho decays geometrically, so the tail is below last / (1 - ratio)
  CHECK(total == doctest::Approx(psi(d, m)).epsilon(1e-10));
  CHECK(total / arl(d) == doctest::Approx(stadd(d, m)).epsilon(1e-10));
}

TEST_CASE("SADD with zero headstart peaks at k = 0") {
  const ExpChangeModel m(0.5);
  const auto s = sadd(EwmaDesign(0.3, 0.0, 2.0), m);
  CHECK(s.k_at_sup == 0);
  CHECK(s.sadd == doctest::Approx(add0(EwmaDesign(0.3, 0.0, 2.0), m)).epsilon(1e-12));
}

TEST_CASE("SADD with a headstart is attained later and matches Nystrom") {
  const ExpChangeModel m(1.0);
  const EwmaDesign d(0.15, 1.0, 1.6);
  ProfileOptions cf;
  ProfileOptions grid;
  grid.closed_form_min_lambda = 2.0;  // force the grid path
  const auto a = profile(d, m, cf);
  const auto b = profile(d, m, grid);
  CHECK(a.delay_method == DelayMethod::ClosedForm);
  CHECK(b.delay_method == DelayMethod::Nystrom);
  CHECK(a.k_at_sup > 0);
  CHECK(a.sadd > a.add.front());
  CHECK(a.sadd == doctest::Approx(b.sadd).epsilon(1e-7));
  CHECK(a.stadd == doctest::Approx(b.stadd).epsilon(1e-9));
}

TEST_CASE("small-lambda closed forms stay positive near the degenerate edge") {
  const ExpChangeModel m(1.0);
  const SeriesTruncation t{1e-12, 5000};
  // from z = 0 the ARL is astronomically large; near A / alpha it is short
  const EwmaDesign d(0.0074, 1.98, 1.97);
  CHECK(arl(d, t) > 1e30);
  CHECK(stadd(d, m, t) > 0.0);
  CHECK(psi(d, m, t) / arl(d, t) == doctest::Approx(stadd(d, m, t)).epsilon(1e-12));
  // ARL rises from 1 to 1e30 within one ulp of A = alpha z
  CHECK_THROWS_AS(calibrate_ewma(0.0074, 1.98, {100.0, 1e-9}, t), NonConvergence);
}
