#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ewmaopt/errors.hpp"
#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/mc_oracle.hpp"

using namespace ewmaopt;

namespace {

McConfig config(std::size_t reps, unsigned threads = 1) {
  McConfig c;
  c.replications = reps;
  c.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("lambda = 1 EWMA has geometric run length e^A") {
  const ExpChangeModel m(1.0);
  const auto e = estimate_arl(ProcedureSpec::ewma(1.0, 0.0, 2.0), m, config(40000));
  CHECK(std::abs(e.mean - std::exp(2.0)) < 3.0 * e.std_error);
  CHECK(e.replications_used == 40000);
  CHECK_FALSE(e.flagged);
}

TEST_CASE("SR ARL identity under simulation") {
  const ExpChangeModel m(1.0);
  const auto e = estimate_arl(ProcedureSpec::sr(30.0, 1.0), m, config(40000));
  CHECK(std::abs(e.mean - 60.0) < 3.0 * e.std_error);
  const auto f = estimate_arl(ProcedureSpec::srr(10.0, 30.0, 1.0), m, config(40000));
  CHECK(std::abs(f.mean - 50.0) < 3.0 * f.std_error);
}

TEST_CASE("EWMA estimates agree with the closed forms") {
  const ExpChangeModel m(0.5);
  const EwmaDesign d(0.3, 0.5, 1.5);
  const auto spec = ProcedureSpec::ewma(0.3, 0.5, 1.5);
  const auto a = estimate_arl(spec, m, config(40000));
  CHECK(std::abs(a.mean - arl(d)) < 3.0 * a.std_error);
  const auto b = estimate_add(spec, m, 0, config(40000));
  CHECK(std::abs(b.mean - add0(d, m)) < 3.0 * b.std_error);
  const auto c = estimate_stadd(spec, m, static_cast<std::uint64_t>(20.0 * arl(d)), config(40000));
  CHECK(std::abs(c.mean - stadd(d, m)) < 3.0 * c.std_error);
}

TEST_CASE("results do not depend on the thread count") {
  const ExpChangeModel m(1.0);
  const auto spec = ProcedureSpec::ewma(0.2, 1.0, 1.6);
  const auto one = estimate_add(spec, m, 5, config(5000, 1));
  const auto four = estimate_add(spec, m, 5, config(5000, 4));
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK(one.discarded == four.discarded);
}

TEST_CASE("threshold zero stops at the first observation") {
  const ExpChangeModel m(1.0);
  const auto e = estimate_arl(ProcedureSpec::ewma(0.5, 0.0, 0.0), m, config(100));
  CHECK(e.mean == 1.0);
  CHECK(e.std_error == 0.0);
}

TEST_CASE("conditioning on survival needs enough survivors") {
  const ExpChangeModel m(1.0);
  auto cfg = config(2000);
  cfg.min_survivors = 1000;
  // ARL about e^0.5, so almost nothing survives 30 pre-change observations
  CHECK_THROWS_AS(estimate_add(ProcedureSpec::ewma(1.0, 0.0, 0.5), m, 30, cfg), InsufficientConditioning);
}

TEST_CASE("horizon cap hits are counted and flagged") {
  const ExpChangeModel m(1.0);
  auto cfg = config(1000);
  cfg.horizon_cap = 5;
  const auto e = estimate_arl(ProcedureSpec::ewma(1.0, 0.0, 5.0), m, cfg);
  CHECK(e.cap_hits > 900);
  CHECK(e.flagged);
  Xoshiro256ss rng(1);
  const auto run = run_once(ProcedureSpec::ewma(1.0, 0.0, 50.0), m, rng, std::nullopt, 10);
  CHECK(run.capped);
  CHECK(run.stop_time == 10);
}

TEST_CASE("invalid specifications") {
  CHECK_THROWS_AS(ProcedureSpec::ewma(0.0, 0.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ProcedureSpec::ewma(0.5, -1.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ProcedureSpec::sr(-1.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(1).validate(), std::invalid_argument);
}
