#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ewmaopt/errors.hpp"
#include "ewmaopt/parallel.hpp"
#include "ewmaopt/q_series.hpp"
#include "ewmaopt/random.hpp"

using namespace ewmaopt;

TEST_CASE("q_pochhammer hand values") {
  CHECK(q_pochhammer(0.5, 0) == 1.0);
  // (1 - 1/2)(1 - 1/4)(1 - 1/8)
  CHECK(q_pochhammer(0.5, 3) == doctest::Approx(0.328125).epsilon(1e-15));
  CHECK(q_pochhammer(0.0, 7) == 1.0);
}

TEST_CASE("q_bracket_factorial hand values") {
  CHECK(q_bracket_factorial(0.5, 0) == 1.0);
  // [1][1.5][1.75]
  CHECK(q_bracket_factorial(0.5, 3) == doctest::Approx(2.625).epsilon(1e-15));
  // q -> 0 gives [j]_q = 1
  CHECK(q_bracket_factorial(0.0, 5) == 1.0);
  // small q: [n]_q! approaches n! as q -> 1
  CHECK(q_bracket_factorial(1e-9, 4) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(q_bracket_factorial(0.999999, 5) == doctest::Approx(120.0).epsilon(1e-4));
}

TEST_CASE("q functions reject bad arguments") {
  CHECK_THROWS_AS(q_pochhammer(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(q_pochhammer(-0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(q_pochhammer(0.5, -1), std::invalid_argument);
  CHECK_THROWS_AS(q_bracket_factorial(1.2, 2), std::invalid_argument);
}

TEST_CASE("QFactorialTable matches direct evaluation") {
  QFactorialTable table(0.7);
  table.extend(40);
  REQUIRE(table.size() == 40);
  double fact = 1.0;
  for (int n = 0; n <= 40; ++n) {
    if (n > 0) fact *= n;
    CHECK(table.pochhammer(n) == doctest::Approx(q_pochhammer(0.7, n)).epsilon(1e-13));
    CHECK(table.bracket(n) == doctest::Approx(q_bracket_factorial(0.7, n)).epsilon(1e-13));
    CHECK(table.bracket_ratio(n) == doctest::Approx(q_bracket_factorial(0.7, n) / fact).epsilon(1e-12));
    CHECK(table.bracket_ratio(n) <= 1.0);
  }
}

TEST_CASE("bracket_ratio stays finite when bracket overflows") {
  QFactorialTable table(0.9999, 400);
  CHECK(std::isfinite(table.bracket_ratio(400)));
  CHECK(table.bracket_ratio(400) > 0.0);
}

TEST_CASE("sum_series: geometric and exponential") {
  const auto geo = sum_series([](int n) { return std::pow(0.5, n); });
  CHECK(geo.value == doctest::Approx(1.0).epsilon(1e-12));
  double term = 1.0;
  const auto ex = sum_series([&](int n) {
    term *= 2.0 / n;
    return term;
  });
  CHECK(1.0 + ex.value == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
}

TEST_CASE("sum_series throws when the cap is hit") {
  CHECK_THROWS_AS(sum_series([](int n) { return 1.0 / n; }, {1e-12, 200}), NonConvergence);
  CHECK_THROWS_AS((SeriesTruncation{0.0, 10}.validate()), std::invalid_argument);
}

TEST_CASE("CompensatedSum recovers small terms") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
}

TEST_CASE("pairwise_sum and parallel_for") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
  CHECK(pairwise_sum(v) == 500500.0);
  std::vector<int> seen(257, 0);
  parallel_for(seen.size(), 4, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) seen[i] += 1;
  });
  for (int s : seen) CHECK(s == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t, std::size_t) { throw std::runtime_error("x"); }),
                  std::runtime_error);
}

TEST_CASE("xoshiro substreams are reproducible and distinct") {
  auto a = Xoshiro256ss::for_stream(7, 3);
  auto b = Xoshiro256ss::for_stream(7, 3);
  auto c = Xoshiro256ss::for_stream(7, 4);
  const auto a1 = a();
  CHECK(a1 == b());
  CHECK(a1 != c());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform_open0();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}
