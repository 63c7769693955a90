#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace ewmaopt {

/// Stop rule for infinite series: stop once |term_n| <= rel_tol * |partial sum|
/// on three consecutive terms; give up after max_terms.
struct SeriesTruncation {
  double rel_tol = 1e-12;
  int max_terms = 500;

  void validate() const;
};

/// (q; q)_n = prod_{j=1}^n (1 - q^j), with (q; q)_0 = 1. Requires 0 <= q < 1.
double q_pochhammer(double q, int n);

/// [n]_q! = prod_{j=1}^n [j]_q = (q; q)_n / (1 - q)^n, with [0]_q! = 1.
double q_bracket_factorial(double q, int n);

/// Incrementally built table of (q;q)_n, [n]_q! and [n]_q!/n! for one q.
/// Grows on demand via extend(); read-only access afterwards is thread-safe.
class QFactorialTable {
 public:
  explicit QFactorialTable(double q, int n = 0);

  void extend(int n);

  [[nodiscard]] double q() const noexcept { return q_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(pochhammer_.size()) - 1; }

  [[nodiscard]] double pochhammer(int n) const { return pochhammer_.at(static_cast<std::size_t>(n)); }
  /// May overflow to +inf for large n when q is close to 1; prefer bracket_ratio().
  [[nodiscard]] double bracket(int n) const { return brackets_.at(static_cast<std::size_t>(n)); }
  /// [n]_q! / n!, which lies in (0, 1] and never overflows.
  [[nodiscard]] double bracket_ratio(int n) const { return ratios_.at(static_cast<std::size_t>(n)); }

 private:
  double q_;
  std::vector<double> pochhammer_{1.0};
  std::vector<double> brackets_{1.0};
  std::vector<double> ratios_{1.0};
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SeriesResult {
  double value = 0.0;
  int terms = 0;
};

/// Sums term(1) + term(2) + ... with compensated summation. Terms are
/// requested strictly in order n = 1, 2, ..., so the generator may carry
/// state from one term to the next. Throws NonConvergence when max_terms is
/// exhausted before the stop rule fires.
SeriesResult sum_series(const std::function<double(int)>& term, const SeriesTruncation& trunc = {});

}  // namespace ewmaopt
