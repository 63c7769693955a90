#include "ewmaopt/ewma_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "ewmaopt/errors.hpp"
#include "ewmaopt/oc_fredholm.hpp"

namespace ewmaopt {

EwmaDesign::EwmaDesign(double lambda_, double headstart_, double threshold_)
    : lambda(lambda_), headstart(headstart_), threshold(threshold_) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("EwmaDesign: lambda must lie in (0, 1], got " + std::to_string(lambda));
  }
  if (!(headstart >= 0.0) || !std::isfinite(headstart)) {
    throw std::invalid_argument("EwmaDesign: headstart must be >= 0, got " + std::to_string(headstart));
  }
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("EwmaDesign: threshold must be positive, got " + std::to_string(threshold));
  }
}

namespace {

// 1 - q^n without cancellation for q near 1.
double one_minus_pow(double q, int n) {
  if (q <= 0.0) return n == 0 ? 0.0 : 1.0;
  return -std::expm1(n * std::log(q));
}

// sum_{n>=1} (x^n - y^n) [n-1]_alpha! / n! for 0 <= y <= x, summed termwise as
// x^n (1 - (y/x)^n) so that nearby x and y do not cancel.
double ladder_difference(double alpha, double x, double y, const SeriesTruncation& trunc) {
  const double lambda = 1.0 - alpha;
  const double log_ratio = y > 0.0 ? std::log(y / x) : -std::numeric_limits<double>::infinity();
  double u = x;
  auto term = [&](int n) {
    const double t = u * -std::expm1(n * log_ratio);
    u *= x * (one_minus_pow(alpha, n) / lambda) / (n + 1);
    return t;
  };
  return sum_series(term, trunc).value;
}

// E[T] from z when the observation mean is 1 / c, with alpha and lambda of d.
double mean_run_length(const EwmaDesign& d, double c, const SeriesTruncation& trunc) {
  if (d.degenerate()) return 1.0;
  const double a = d.alpha();
  return 1.0 + ladder_difference(a, d.threshold * c, a * d.headstart * c, trunc) / d.lambda;
}

}  // namespace

double arl(const EwmaDesign& design, const SeriesTruncation& trunc) {
  trunc.validate();
  return mean_run_length(design, 1.0, trunc);
}

double add0(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc) {
  trunc.validate();
  return mean_run_length(design, 1.0 / (1.0 + model.theta()), trunc);
}

double psi(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc) {
  trunc.validate();
  if (design.degenerate()) return 1.0;
  const double a = design.alpha();
  const double lambda = design.lambda;
  const double c = 1.0 / (1.0 + model.theta());
  const double b00 = add0(EwmaDesign(lambda, 0.0, design.threshold), model, trunc);

  // With u_n(x) = x^n [n-1]_a! / n!, rho = a z / A and
  // s_n = sum_{j<=n} c^j a^j / (1 - a^j):
  //   psi = ADD_0(0) + (1/lambda) sum_n u_n(A) [(1 - rho^n)(ADD_0(0) - s_{n-1}) - rho^n c^n]
  const double x = design.threshold;
  const double log_ratio = design.headstart > 0.0 ? std::log(a * design.headstart / x)
                                                  : -std::numeric_limits<double>::infinity();
  double u = x;
  double s_prev = 0.0;
  double cn = 1.0;
  auto term = [&](int n) {
    cn *= c;
    const double rn = std::exp(n * log_ratio);
    const double t = u * (-std::expm1(n * log_ratio) * (b00 - s_prev) - rn * cn);
    u *= x * (one_minus_pow(a, n) / lambda) / (n + 1);
    if (a > 0.0) s_prev += cn * std::pow(a, n) / one_minus_pow(a, n);
    return t;
  };
  return b00 + sum_series(term, trunc).value / lambda;
}

double stadd(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc) {
  return psi(design, model, trunc) / arl(design, trunc);
}

double SeriesCoefficients::coefficient(int n) const {
  return scaled.at(static_cast<std::size_t>(n)) / std::pow(lambda, n);
}

double SeriesCoefficients::evaluate(double z) const {
  const double x = z / lambda;
  CompensatedSum sum;
  double t = 1.0;
  for (std::size_t n = 0; n < scaled.size(); ++n) {
    if (n > 0) t *= x / static_cast<double>(n);
    sum += scaled[n] * t;
  }
  return sum.value();
}

int coefficient_count(const EwmaDesign& design) {
  const double w = design.threshold / design.lambda;
  return static_cast<int>(std::ceil(w + 12.0 * std::sqrt(w) + 40.0));
}

namespace {

SeriesCoefficients decaying_coeffs(const EwmaDesign& design, double c, double b0) {
  const EwmaDesign d0(design.lambda, 0.0, design.threshold);
  const int count = coefficient_count(design);
  const double a = design.alpha();
  SeriesCoefficients out;
  out.lambda = design.lambda;
  out.scaled.assign(static_cast<std::size_t>(count) + 1, 0.0);
  out.scaled[0] = b0;
  double power = 1.0;  // (a c)^n
  double poch = 1.0;   // (a; a)_{n-1}
  for (int n = 1; n <= count; ++n) {
    power *= a * c;
    out.scaled[static_cast<std::size_t>(n)] = -power * poch;
    poch *= one_minus_pow(a, n);
  }
  return out;
}

}  // namespace

SeriesCoefficients arl_coeffs(const EwmaDesign& design, const SeriesTruncation& trunc) {
  return decaying_coeffs(design, 1.0, arl(EwmaDesign(design.lambda, 0.0, design.threshold), trunc));
}

SeriesCoefficients add0_coeffs(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc) {
  const double c = 1.0 / (1.0 + model.theta());
  return decaying_coeffs(design, c, add0(EwmaDesign(design.lambda, 0.0, design.threshold), model, trunc));
}

SeriesCoefficients constant_coeffs(const EwmaDesign& design, double value) {
  SeriesCoefficients out;
  out.lambda = design.lambda;
  out.scaled.assign(static_cast<std::size_t>(coefficient_count(design)) + 1, 0.0);
  out.scaled[0] = value;
  return out;
}

SeriesCoefficients delta_k_coeffs(const SeriesCoefficients& previous, const EwmaDesign& design, double boundary_tol) {
  if (previous.scaled.size() < 2) throw std::invalid_argument("delta_k_coeffs: need at least two coefficients");
  if (std::abs(previous.lambda - design.lambda) > 0.0) {
    throw std::invalid_argument("delta_k_coeffs: coefficients belong to a different lambda");
  }
  const std::size_t count = previous.scaled.size() - 1;
  const double a = design.alpha();
  const double w = design.threshold / design.lambda;
  const double log_w = std::log(w);

  // sigma_n = sum_{m<n} scaled_m; b0 = E[sigma_N], N ~ Poisson(w).
  std::vector<double> sigma(count + 1, 0.0);
  CompensatedSum running;
  CompensatedSum b0_sum;
  for (std::size_t n = 1; n <= count; ++n) {
    running += previous.scaled[n - 1];
    sigma[n] = running.value();
    const double nn = static_cast<double>(n);
    b0_sum += std::exp(-w + nn * log_w - std::lgamma(nn + 1.0)) * sigma[n];
  }
  const double b0 = b0_sum.value();

  SeriesCoefficients out;
  out.order = previous.order + 1;
  out.lambda = design.lambda;
  out.scaled.assign(count + 1, 0.0);
  out.scaled[0] = b0;
  double power = 1.0;
  for (std::size_t n = 1; n <= count; ++n) {
    power *= a;
    out.scaled[n] = power * (b0 - sigma[n]);
  }

  if (a > 0.0) {
    const double residual = out.evaluate(design.threshold / a);
    if (!std::isfinite(residual) || std::abs(residual) > boundary_tol * std::abs(b0)) {
      throw CancellationDetected("coefficient recursion lost precision at k = " + std::to_string(out.order) +
                                 " (boundary residual " + std::to_string(residual / b0) + ")");
    }
  }
  return out;
}

SurvivalSystem survival_coeffs(const EwmaDesign& design, int k) {
  if (k < 0) throw std::invalid_argument("survival_coeffs: k must be >= 0");
  const double a = design.alpha();
  const double inv_l = 1.0 / design.lambda;
  const double top = design.threshold * inv_l;
  QFactorialTable table(a, k);
  SurvivalSystem sys;
  sys.k = k;
  double am = 1.0;
  for (int m = 1; m < k; ++m) {
    am *= a;
    sys.toeplitz_column.push_back(std::exp(am * top - top) / table.pochhammer(m));
  }
  sys.c.reserve(static_cast<std::size_t>(k));
  for (int m = 1; m <= k; ++m) {
    CompensatedSum s;
    s += 1.0;
    for (int i = 1; i < m; ++i) {
      s += -sys.toeplitz_column[static_cast<std::size_t>(i - 1)] * sys.c[static_cast<std::size_t>(m - i - 1)];
    }
    sys.c.push_back(s.value());
  }
  return sys;
}

double rho_k(const EwmaDesign& design, const SurvivalSystem& system, double z) {
  const int k = system.k;
  if (k == 0) return 1.0;
  const double a = design.alpha();
  if (a * z >= design.threshold) return 0.0;
  const double inv_l = 1.0 / design.lambda;
  const double top = design.threshold * inv_l;
  QFactorialTable table(a, k);
  CompensatedSum s;
  s += 1.0;
  for (int n = 1; n <= k; ++n) {
    const int m = k - n + 1;
    const double am = a > 0.0 ? std::pow(a, m) : 0.0;
    const double h = std::exp(am * z * inv_l - top) / table.pochhammer(m);
    s += -system.c[static_cast<std::size_t>(n - 1)] * h * one_minus_pow(a, m);
  }
  return s.value();
}

double rho_k(const EwmaDesign& design, int k) { return rho_k(design, survival_coeffs(design, k), design.headstart); }

namespace {

void closed_form_delays(const EwmaDesign& design, const ExpChangeModel& model, const ProfileOptions& opts,
                        PerformanceProfile& p) {
  constexpr int probes = 16;
  std::vector<double> ys(probes);
  for (int j = 0; j < probes; ++j) ys[static_cast<std::size_t>(j)] = design.threshold * j / probes;

  SeriesCoefficients rho = constant_coeffs(design, 1.0);
  SeriesCoefficients delta = add0_coeffs(design, model, opts.trunc);
  SupremumTracker tracker(opts.delay);
  std::vector<double> add;
  auto extremes = [&](bool first) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (double y : ys) {
      const double v = first ? delta.evaluate(y) : delta.evaluate(y) / rho.evaluate(y);
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    return std::pair{hi, lo};
  };
  add.push_back(p.add.front());
  auto [hi, lo] = extremes(true);
  bool done = tracker.record(0, add.back(), hi, lo);
  for (int k = 1; !done; ++k) {
    rho = delta_k_coeffs(rho, design, opts.boundary_tol);
    delta = delta_k_coeffs(delta, design, opts.boundary_tol);
    const double s = rho.b0();
    for (double& v : rho.scaled) v /= s;
    for (double& v : delta.scaled) v /= s;
    add.push_back(delta.evaluate(design.headstart) / rho.evaluate(design.headstart));
    std::tie(hi, lo) = extremes(false);
    done = tracker.record(k, add.back(), hi, lo);
  }
  p.add = std::move(add);
  p.sadd = tracker.sup();
  p.k_at_sup = tracker.argmax();
  p.stabilized = tracker.stabilized();
  p.plateau = tracker.plateau();
  p.delay_method = DelayMethod::ClosedForm;
}

void nystrom_delays(const EwmaDesign& design, const ExpChangeModel& model, const ProfileOptions& opts,
                    PerformanceProfile& p) {
  const KernelSpec kernel = ewma_kernel(model, design.lambda, design.threshold);
  const Quadrature quad = Quadrature::uniform(design.threshold, opts.nystrom_panels, 10);
  const OcSolution sol = solve_add0(discretize(kernel, quad));
  const DelayCurve curve = iterate_rho_delta(sol, design.headstart, opts.delay);
  p.add = curve.add;
  p.sadd = curve.sup;
  p.k_at_sup = curve.k_at_sup;
  p.stabilized = curve.stabilized;
  p.plateau = curve.plateau;
  p.delay_method = DelayMethod::Nystrom;
}

}  // namespace

PerformanceProfile profile(const EwmaDesign& design, const ExpChangeModel& model, const ProfileOptions& opts) {
  opts.trunc.validate();
  PerformanceProfile p;
  if (design.degenerate()) {
    p.arl = p.psi = p.stadd = p.sadd = p.plateau = 1.0;
    p.add = {1.0};
    p.degenerate = true;
    p.stabilized = true;
    return p;
  }
  p.arl = arl(design, opts.trunc);
  p.psi = psi(design, model, opts.trunc);
  p.stadd = p.psi / p.arl;
  p.add = {add0(design, model, opts.trunc)};
  if (!opts.compute_delays) {
    p.sadd = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  const bool closed_form =
      design.lambda >= opts.closed_form_min_lambda && coefficient_count(design) <= opts.trunc.max_terms;
  if (closed_form) {
    try {
      closed_form_delays(design, model, opts, p);
      return p;
    } catch (const CancellationDetected&) {
      p.add.resize(1);
    }
  }
  nystrom_delays(design, model, opts, p);
  return p;
}

SaddResult sadd(const EwmaDesign& design, const ExpChangeModel& model, const SeriesTruncation& trunc,
                const DelayPolicy& policy) {
  ProfileOptions opts;
  opts.trunc = trunc;
  opts.delay = policy;
  const PerformanceProfile p = profile(design, model, opts);
  return {p.sadd, p.k_at_sup, p.add, p.stabilized, p.delay_method};
}

}  // namespace ewmaopt
