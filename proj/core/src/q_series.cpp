#include "ewmaopt/q_series.hpp"

#include <stdexcept>
#include <string>

#include "ewmaopt/errors.hpp"

namespace ewmaopt {

namespace {
void check_q(double q, const char* who) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": q must lie in [0, 1), got " + std::to_string(q));
  }
}
void check_n(int n, const char* who) {
  if (n < 0) throw std::invalid_argument(std::string(who) + ": n must be nonnegative");
}
}  // namespace

void SeriesTruncation::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("SeriesTruncation: rel_tol must be positive");
  if (max_terms < 1) throw std::invalid_argument("SeriesTruncation: max_terms must be >= 1");
}

double q_pochhammer(double q, int n) {
  check_q(q, "q_pochhammer");
  check_n(n, "q_pochhammer");
  double prod = 1.0;
  double qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= q;
    prod *= 1.0 - qj;
  }
  return prod;
}

double q_bracket_factorial(double q, int n) {
  check_q(q, "q_bracket_factorial");
  check_n(n, "q_bracket_factorial");
  // [j]_q = 1 + q + ... + q^{j-1}; the geometric sum avoids dividing by 1 - q.
  double prod = 1.0;
  double bracket = 0.0;
  double qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    bracket += qj;
    qj *= q;
    prod *= bracket;
  }
  return prod;
}

QFactorialTable::QFactorialTable(double q, int n) : q_(q) {
  check_q(q, "QFactorialTable");
  extend(n);
}

void QFactorialTable::extend(int n) {
  check_n(n, "QFactorialTable::extend");
  const auto want = static_cast<std::size_t>(n) + 1;
  if (pochhammer_.size() >= want) return;
  pochhammer_.reserve(want);
  brackets_.reserve(want);
  ratios_.reserve(want);
  const double log_q = q_ > 0.0 ? std::log(q_) : 0.0;
  for (auto j = static_cast<int>(pochhammer_.size()); static_cast<std::size_t>(j) < want; ++j) {
    // 1 - q^j via expm1 keeps full relative accuracy when q is close to 1.
    const double one_minus_qj = q_ > 0.0 ? -std::expm1(j * log_q) : 1.0;
    const double bracket = one_minus_qj / (1.0 - q_);
    pochhammer_.push_back(pochhammer_.back() * one_minus_qj);
    brackets_.push_back(brackets_.back() * bracket);
    ratios_.push_back(ratios_.back() * bracket / j);
  }
}

SeriesResult sum_series(const std::function<double(int)>& term, const SeriesTruncation& trunc) {
  trunc.validate();
  CompensatedSum sum;
  int small_run = 0;
  for (int n = 1; n <= trunc.max_terms; ++n) {
    const double t = term(n);
    sum.add(t);
    if (std::abs(t) <= trunc.rel_tol * std::abs(sum.value())) {
      if (++small_run >= 3) return {sum.value(), n};
    } else {
      small_run = 0;
    }
  }
  throw NonConvergence("sum_series: stop rule did not fire within " + std::to_string(trunc.max_terms) + " terms");
}

}  // namespace ewmaopt
