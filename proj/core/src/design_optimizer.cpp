#include "ewmaopt/design_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ewmaopt/errors.hpp"
#include "ewmaopt/oc_fredholm.hpp"
#include "ewmaopt/parallel.hpp"

namespace ewmaopt {

std::string_view to_string(Objective objective) { return objective == Objective::Sadd ? "sadd" : "stadd"; }

Objective parse_objective(std::string_view text) {
  if (text == "sadd" || text == "SADD") return Objective::Sadd;
  if (text == "stadd" || text == "STADD") return Objective::Stadd;
  throw std::invalid_argument("unknown objective '" + std::string(text) + "' (expected sadd or stadd)");
}

void CalibrationTarget::validate() const {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("CalibrationTarget: gamma must exceed 1, got " + std::to_string(gamma));
  }
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("CalibrationTarget: rel_tol must lie in (0, 1)");
}

double calibrate_threshold(const std::function<double(double)>& arl_of_threshold, const CalibrationTarget& target,
                           Bracket bracket) {
  target.validate();
  if (!(bracket.lo > 0.0 && bracket.hi > bracket.lo)) {
    throw std::invalid_argument("calibrate_threshold: need 0 < lo < hi");
  }
  const double log_gamma = std::log(target.gamma);
  auto f = [&](double a) {
    const double v = arl_of_threshold(a);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : std::log(v) - log_gamma;
  };
  auto close_enough = [&](double fv) { return std::isfinite(fv) && std::abs(std::expm1(fv)) <= target.rel_tol; };

  double lo = bracket.lo;
  double hi = bracket.hi;
  double flo = f(lo);
  double fhi = f(hi);
  int expansions = 0;
  while (flo > 0.0) {
    if (++expansions > 60) throw BracketFailure("calibrate_threshold: could not bracket the target from below");
    hi = lo;
    fhi = flo;
    lo *= 0.5;
    flo = f(lo);
  }
  while (fhi < 0.0) {
    if (++expansions > 60) throw BracketFailure("calibrate_threshold: could not bracket the target from above");
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
  }
  if (close_enough(flo)) return lo;
  if (close_enough(fhi)) return hi;

  int side = 0;
  for (int iter = 0; iter < 300; ++iter) {
    double a = 0.5 * (lo + hi);
    if (std::isfinite(flo) && std::isfinite(fhi) && fhi != flo) {
      const double s = hi - fhi * (hi - lo) / (fhi - flo);
      if (s > lo && s < hi) a = s;
    }
    const double fa = f(a);
    if (close_enough(fa)) return a;
    if (fa < 0.0) {
      lo = a;
      flo = fa;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = a;
      fhi = fa;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      throw NonConvergence("calibrate_threshold: ARL jumps past the target between adjacent thresholds");
    }
  }
  throw NonConvergence("calibrate_threshold: no convergence after 300 iterations");
}

double calibrate_ewma(double lambda, double headstart, const CalibrationTarget& target,
                      const SeriesTruncation& trunc) {
  const EwmaDesign probe(lambda, headstart, 1.0);
  const double floor = probe.alpha() * headstart;
  auto eval = [&](double a) {
    try {
      return arl(EwmaDesign(lambda, headstart, a), trunc);
    } catch (const NonConvergence&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  return calibrate_threshold(eval, target, {std::max(floor, 1e-3), floor + 1.0});
}

double calibrate_srr(const ExpChangeModel& statistic_model, double r, const CalibrationTarget& target) {
  target.validate();
  const double a0 = (target.gamma + r) / (1.0 + statistic_model.theta());
  auto eval = [&](double a) {
    const OcSolution sol = solve_arl(sr_kernel(statistic_model, a), default_sr_quadrature(a));
    return sol.arl_at(r);
  };
  return calibrate_threshold(eval, target, {a0 * 0.99, a0 * 1.01});
}

DesignPoint evaluate_design(double lambda, double headstart, const ExpChangeModel& model, double gamma,
                            Objective objective, const OptimizerOptions& opts) {
  const double a = calibrate_ewma(lambda, headstart, {gamma, opts.calibration_tol}, opts.profile.trunc);
  const EwmaDesign design(lambda, headstart, a);
  ProfileOptions po = opts.profile;
  po.compute_delays = objective == Objective::Sadd;
  PerformanceProfile p = profile(design, model, po);
  const double value = objective == Objective::Sadd ? p.sadd : p.stadd;
  return {design, value, std::move(p)};
}

namespace {

struct Candidate {
  double lambda = 0.0;
  double z = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

bool better(const Candidate& a, const Candidate& b) {
  if (!(a.value < std::numeric_limits<double>::infinity())) return false;
  const double tie = 1e-9 * std::abs(b.value);
  if (a.value < b.value - tie) return true;
  return std::abs(a.value - b.value) <= tie && a.lambda < b.lambda;
}

// Nelder-Mead in n = 1 or 2 dimensions.
template <class F>
std::vector<double> nelder_mead(F&& f, std::vector<std::vector<double>> simplex, const std::function<bool(
                                    const std::vector<std::vector<double>>&, const std::vector<double>&)>& converged,
                                int max_evals, int& evals) {
  const std::size_t n = simplex.size() - 1;
  std::vector<double> fv(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    fv[i] = f(simplex[i]);
    ++evals;
  }
  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2;
      std::vector<double> f2;
      for (auto i : order) {
        s2.push_back(simplex[i]);
        f2.push_back(fv[i]);
      }
      simplex = std::move(s2);
      fv = std::move(f2);
    }
    if (converged(simplex, fv)) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + t * (simplex[n][d] - centroid[d]);
      return p;
    };
    const auto xr = blend(-1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[0]) {
      const auto xe = blend(-2.0);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
      continue;
    }
    const bool outside = fr < fv[n];
    const auto xc = blend(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    ++evals;
    if (fc < std::min(fr, fv[n])) {
      simplex[n] = xc;
      fv[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
      fv[i] = f(simplex[i]);
      ++evals;
    }
  }
  return simplex.front();
}

}  // namespace

DesignOptimum optimize_design(const ExpChangeModel& model, const CalibrationTarget& target, Objective objective,
                              std::optional<double> z_fixed, const OptimizerOptions& opts) {
  target.validate();
  if (opts.lambda_points < 2 || opts.z_points < 2 || !(opts.lambda_min > 0.0) || opts.lambda_max > 1.0 ||
      !(opts.lambda_min < opts.lambda_max)) {
    throw std::invalid_argument("OptimizerOptions: invalid grid");
  }
  if (z_fixed && !(*z_fixed >= 0.0)) throw std::invalid_argument("optimize_design: fixed z must be >= 0");

  const double gamma = target.gamma;
  auto safe_value = [&](double lambda, double z) {
    try {
      return evaluate_design(lambda, z, model, gamma, objective, opts).value;
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<Candidate> grid;
  const double l0 = std::log(opts.lambda_min);
  const double l1 = std::log(opts.lambda_max);
  const double dl = (l1 - l0) / (opts.lambda_points - 1);
  const double dz = opts.z_max / (opts.z_points - 1);
  for (int i = 0; i < opts.lambda_points; ++i) {
    const double lambda = i + 1 == opts.lambda_points ? opts.lambda_max : std::exp(l0 + dl * i);
    if (z_fixed) {
      grid.push_back({lambda, *z_fixed});
    } else {
      for (int j = 0; j < opts.z_points; ++j) grid.push_back({lambda, dz * j});
    }
  }
  parallel_for(grid.size(), opts.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) grid[i].value = safe_value(grid[i].lambda, grid[i].z);
  });

  Candidate best;
  for (const auto& c : grid) {
    if (better(c, best) || !(best.value < std::numeric_limits<double>::infinity())) {
      if (c.value < std::numeric_limits<double>::infinity()) best = c;
    }
  }
  if (!(best.value < std::numeric_limits<double>::infinity())) {
    throw NonConvergence("optimize_design: every grid candidate failed");
  }
  DesignOptimum out;
  out.objective = objective;
  out.evaluations = static_cast<int>(grid.size());
  out.grid_best = best.value;

  const std::size_t dims = z_fixed ? 1 : 2;
  auto decode = [&](const std::vector<double>& x) {
    const double lambda = std::clamp(std::exp(x[0]), opts.simplex_lambda_min, 1.0);
    const double z = z_fixed ? *z_fixed : std::max(0.0, x[1]);
    return std::pair{lambda, z};
  };
  Candidate incumbent = best;
  auto f = [&](const std::vector<double>& x) {
    const auto [lambda, z] = decode(x);
    Candidate c{lambda, z, safe_value(lambda, z)};
    if (better(c, incumbent)) incumbent = c;
    return c.value;
  };
  std::vector<std::vector<double>> simplex;
  const double u = std::log(best.lambda);
  if (dims == 1) {
    simplex = {{u}, {u - 0.5 * dl}};
  } else {
    simplex = {{u, best.z}, {u - 0.5 * dl, best.z}, {u, best.z + 0.5 * dz}};
  }
  auto converged = [&](const std::vector<std::vector<double>>& s, const std::vector<double>& fv) {
    if (!(fv.back() - fv.front() <= opts.ftol * std::abs(fv.front()))) return false;
    const auto [l_best, z_best] = decode(s.front());
    for (std::size_t i = 1; i < s.size(); ++i) {
      const auto [li, zi] = decode(s[i]);
      if (std::abs(li - l_best) > opts.xtol || std::abs(zi - z_best) > opts.xtol) return false;
    }
    return true;
  };
  int evals = 0;
  nelder_mead(f, simplex, converged, opts.max_simplex_evals, evals);
  out.evaluations += evals;

  const DesignPoint final_point = evaluate_design(incumbent.lambda, incumbent.z, model, gamma, objective, opts);
  out.lambda_star = incumbent.lambda;
  out.z_star = incumbent.z;
  out.A_star = final_point.design.threshold;
  out.value = final_point.value;
  out.profile = final_point.profile;
  return out;
}

std::vector<LambdaOptPoint> lambda_opt_curve(const ExpChangeModel& model, Objective objective,
                                             const std::vector<double>& gamma_grid, double z_fixed,
                                             const OptimizerOptions& opts) {
  if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end())) {
    throw std::invalid_argument("lambda_opt_curve: gamma grid must be increasing");
  }
  std::vector<LambdaOptPoint> out;
  for (double gamma : gamma_grid) {
    const DesignOptimum o = optimize_design(model, {gamma}, objective, z_fixed, opts);
    out.push_back({gamma, o.lambda_star, o.A_star, o.value});
  }
  return out;
}

SrBenchmark sr_benchmark(const ExpChangeModel& statistic_model, const ExpChangeModel& data_model, double gamma,
                         bool with_delays) {
  SrBenchmark b;
  b.threshold = calibrate_srr(statistic_model, 0.0, {gamma, 1e-9});
  const KernelSpec kernel = sr_kernel(statistic_model, data_model, b.threshold);
  const Quadrature quad = default_sr_quadrature(b.threshold);
  if (with_delays) {
    b.profile = kernel_profile(kernel, quad, 0.0);
    return b;
  }
  const OcSolution sol = solve_iadd(discretize(kernel, quad));
  b.profile.arl = sol.arl_at(0.0);
  b.profile.psi = sol.iadd_at(0.0);
  b.profile.stadd = b.profile.psi / b.profile.arl;
  b.profile.add = {sol.add0_at(0.0)};
  b.profile.sadd = std::numeric_limits<double>::quiet_NaN();
  b.profile.delay_method = DelayMethod::Nystrom;
  return b;
}

SrBenchmark sr_benchmark(const ExpChangeModel& model, double gamma, bool with_delays) {
  return sr_benchmark(model, model, gamma, with_delays);
}

SrBenchmark srr_benchmark(const ExpChangeModel& model, double gamma, double r_tol) {
  CalibrationTarget target{gamma, 1e-9};
  target.validate();
  auto evaluate = [&](double u) {
    SrBenchmark b;
    b.r = std::expm1(u);
    b.threshold = calibrate_srr(model, b.r, target);
    b.profile = srr_profile(model, b.threshold, b.r);
    return b;
  };
  const double u_max = std::log1p(gamma / (1.0 + model.theta()));
  constexpr int scan = 12;
  std::vector<SrBenchmark> coarse;
  for (int i = 0; i <= scan; ++i) coarse.push_back(evaluate(u_max * i / scan));
  std::size_t at = 0;
  for (std::size_t i = 1; i < coarse.size(); ++i) {
    if (coarse[i].profile.sadd < coarse[at].profile.sadd) at = i;
  }
  double a = u_max * static_cast<double>(at == 0 ? 0 : at - 1) / scan;
  double b = u_max * static_cast<double>(std::min<std::size_t>(at + 1, scan)) / scan;
  SrBenchmark best = coarse[at];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  SrBenchmark fc = evaluate(c);
  SrBenchmark fd = evaluate(d);
  while (b - a > r_tol) {
    if (fc.profile.sadd < fd.profile.sadd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
    }
    for (const SrBenchmark* s : {&fc, &fd}) {
      if (s->profile.sadd < best.profile.sadd) best = *s;
    }
  }
  return best;
}

MisspecReport misspecification_study(double theta_design, const std::vector<double>& theta_true_grid,
                                     const std::vector<double>& gamma_grid, double z_fixed,
                                     const OptimizerOptions& opts) {
  if (theta_true_grid.empty() || gamma_grid.empty()) {
    throw std::invalid_argument("misspecification_study: empty grid");
  }
  if (theta_design > *std::min_element(theta_true_grid.begin(), theta_true_grid.end())) {
    throw std::invalid_argument("misspecification_study: design for the smallest change (theta_design <= all theta_true)");
  }
  const ExpChangeModel design_model(theta_design);
  MisspecReport report{theta_design, z_fixed, {}};
  for (double gamma : gamma_grid) {
    const DesignOptimum ewma = optimize_design(design_model, {gamma}, Objective::Stadd, z_fixed, opts);
    const EwmaDesign d(ewma.lambda_star, ewma.z_star, ewma.A_star);
    for (double theta_true : theta_true_grid) {
      const ExpChangeModel truth(theta_true);
      MisspecCell cell{};
      cell.gamma = gamma;
      cell.theta_true = theta_true;
      cell.ewma_stadd = stadd(d, truth, opts.profile.trunc);
      cell.sr_misdesigned_stadd = sr_benchmark(design_model, truth, gamma).profile.stadd;
      cell.sr_optimal_stadd = sr_benchmark(truth, gamma).profile.stadd;
      cell.ewma_ratio = cell.ewma_stadd / cell.sr_optimal_stadd;
      cell.sr_ratio = cell.sr_misdesigned_stadd / cell.sr_optimal_stadd;
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace ewmaopt
