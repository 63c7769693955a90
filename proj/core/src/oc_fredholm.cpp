#include "ewmaopt/oc_fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ewmaopt/errors.hpp"

namespace ewmaopt {

namespace {

void require_threshold(double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("kernel threshold must be positive and finite, got " + std::to_string(threshold));
  }
}

}  // namespace

KernelSpec ewma_kernel(const ExpChangeModel& model, double lambda, double threshold) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("ewma_kernel: lambda must lie in (0, 1], got " + std::to_string(lambda));
  }
  require_threshold(threshold);
  const double alpha = 1.0 - lambda;
  KernelSpec k;
  k.threshold = threshold;
  k.data_model = model;
  k.kernel_pre = [=](double x, double y) { return model.density(Regime::PreChange, (y - alpha * x) / lambda) / lambda; };
  k.kernel_post = [=](double x, double y) { return model.density(Regime::PostChange, (y - alpha * x) / lambda) / lambda; };
  k.support_lower = [=](double x) { return alpha * x; };
  k.next_state = [=](double x, double obs) { return alpha * x + lambda * obs; };
  k.observation_for = [=](double x, double y) { return (y - alpha * x) / lambda; };
  return k;
}

KernelSpec sr_kernel(const ExpChangeModel& statistic_model, const ExpChangeModel& data_model, double threshold) {
  require_threshold(threshold);
  const double theta = statistic_model.theta();
  const double slope = theta / (1.0 + theta);
  // Transition density in y: d/dy P(Lambda <= y / (1 + x)).
  auto density = [=](Regime regime, double x, double y) {
    const double t = y / (1.0 + x);
    const double floor = 1.0 / (1.0 + theta);
    if (t <= floor) return 0.0;
    const double kappa = (1.0 + theta) / (theta * data_model.mean(regime));
    return kappa / y * std::exp(-kappa * std::log(t / floor));
  };
  KernelSpec k;
  k.threshold = threshold;
  k.data_model = data_model;
  k.kernel_pre = [=](double x, double y) { return density(Regime::PreChange, x, y); };
  k.kernel_post = [=](double x, double y) { return density(Regime::PostChange, x, y); };
  k.support_lower = [=](double x) { return (1.0 + x) / (1.0 + theta); };
  k.next_state = [=](double x, double obs) { return (1.0 + x) * std::exp(slope * obs) / (1.0 + theta); };
  k.observation_for = [=](double x, double y) {
    if (y <= 0.0) return -1.0;
    return std::log((1.0 + theta) * y / (1.0 + x)) / slope;
  };
  return k;
}

KernelSpec sr_kernel(const ExpChangeModel& model, double threshold) { return sr_kernel(model, model, threshold); }

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

Quadrature Quadrature::composite(std::vector<double> breaks, int order) {
  if (breaks.size() < 2 || order < 1) {
    throw std::invalid_argument("Quadrature: need at least one panel and order >= 1");
  }
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) throw std::invalid_argument("Quadrature: breaks must increase strictly");
  }
  Quadrature q;
  q.breaks_ = std::move(breaks);
  q.order_ = order;
  const GaussLegendre gl = gauss_legendre(order);
  q.ref_nodes_ = gl.nodes;
  q.bary_.assign(gl.nodes.size(), 1.0);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      if (i != j) q.bary_[i] /= gl.nodes[i] - gl.nodes[j];
    }
  }
  for (std::size_t p = 0; p + 1 < q.breaks_.size(); ++p) {
    const double mid = 0.5 * (q.breaks_[p] + q.breaks_[p + 1]);
    const double half = 0.5 * (q.breaks_[p + 1] - q.breaks_[p]);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      q.nodes_.push_back(mid + half * gl.nodes[i]);
      q.weights_.push_back(half * gl.weights[i]);
    }
  }
  return q;
}

Quadrature Quadrature::uniform(double threshold, int panels, int order) {
  require_threshold(threshold);
  if (panels < 1) throw std::invalid_argument("Quadrature: panels must be >= 1");
  std::vector<double> breaks(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) breaks[static_cast<std::size_t>(i)] = threshold * i / panels;
  breaks.back() = threshold;
  return composite(std::move(breaks), order);
}

Quadrature Quadrature::log_graded(double threshold, int panels, int order) {
  require_threshold(threshold);
  if (panels < 1) throw std::invalid_argument("Quadrature: panels must be >= 1");
  const double top = std::log1p(threshold);
  std::vector<double> breaks(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) breaks[static_cast<std::size_t>(i)] = std::expm1(top * i / panels);
  breaks.front() = 0.0;
  breaks.back() = threshold;
  return composite(std::move(breaks), order);
}

int Quadrature::panel_of(double y) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), y);
  const auto idx = static_cast<int>(it - breaks_.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(breaks_.size()) - 2);
}

void Quadrature::lagrange_weights(int panel, double y, std::span<double> out) const {
  const auto p = static_cast<std::size_t>(panel);
  const double a = breaks_[p];
  const double b = breaks_[p + 1];
  const double u = (2.0 * y - a - b) / (b - a);
  double total = 0.0;
  for (std::size_t i = 0; i < ref_nodes_.size(); ++i) {
    const double d = u - ref_nodes_[i];
    if (d == 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      out[i] = 1.0;
      return;
    }
    out[i] = bary_[i] / d;
    total += out[i];
  }
  for (double& v : out) v /= total;
}

Discretization::Discretization(KernelSpec kernel, Quadrature quad, RowIntegration rule)
    : kernel_(std::move(kernel)), quad_(std::move(quad)), rule_(rule), sub_rule_(gauss_legendre(rule.order)) {
  if (std::abs(quad_.upper() - kernel_.threshold) > 1e-12 * kernel_.threshold) {
    throw std::invalid_argument("Discretization: quadrature must span [0, threshold)");
  }
  const auto n = static_cast<Eigen::Index>(quad_.size());
  pre_.resize(n, n);
  post_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = quad_.nodes()[static_cast<std::size_t>(i)];
    pre_.row(i) = row(x, Regime::PreChange);
    post_.row(i) = row(x, Regime::PostChange);
  }
}

Eigen::RowVectorXd Discretization::row(double x, Regime regime) const {
  const auto n = static_cast<Eigen::Index>(quad_.size());
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
  const double a = kernel_.threshold;
  const double x_top = kernel_.observation_for(x, a);
  if (!(x_top > 0.0)) return r;
  const double mean = kernel_.data_model.mean(regime);
  std::vector<double> cuts{0.0};
  const auto& br = quad_.breaks();
  for (std::size_t i = 1; i + 1 < br.size(); ++i) {
    const double xb = kernel_.observation_for(x, br[i]);
    if (xb > 0.0 && xb < x_top) cuts.push_back(xb);
  }
  cuts.push_back(std::min(x_top, rule_.tail_cutoff * mean));
  std::sort(cuts.begin(), cuts.end());

  const auto order = static_cast<std::size_t>(quad_.order());
  std::vector<double> lw(order);
  const double y_cap = std::nextafter(a, 0.0);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c];
    const double hi = cuts[c + 1];
    if (!(hi > lo)) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / (rule_.max_width * mean))));
    const double width = (hi - lo) / pieces;
    for (int piece = 0; piece < pieces; ++piece) {
      const double pa = lo + width * piece;
      const double mid = pa + 0.5 * width;
      for (std::size_t g = 0; g < sub_rule_.nodes.size(); ++g) {
        const double obs = mid + 0.5 * width * sub_rule_.nodes[g];
        const double w = 0.5 * width * sub_rule_.weights[g] * kernel_.data_model.density(regime, obs);
        const double y = std::min(kernel_.next_state(x, obs), y_cap);
        const int panel = quad_.panel_of(y);
        quad_.lagrange_weights(panel, y, lw);
        const auto off = static_cast<Eigen::Index>(panel) * static_cast<Eigen::Index>(order);
        for (std::size_t j = 0; j < order; ++j) r[off + static_cast<Eigen::Index>(j)] += w * lw[j];
      }
    }
  }
  return r;
}

std::shared_ptr<const Discretization> discretize(const KernelSpec& kernel, const Quadrature& quad) {
  return std::make_shared<const Discretization>(kernel, quad);
}

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& k, const char* what) {
  const auto n = k.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - k;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  // rcond alone is scale-free; rcond * |I - K| = 1 / |(I - K)^-1| also
  // catches a kernel that is the identity to rounding.
  const double rc = lu.rcond();
  const double inv_norm = rc * m.cwiseAbs().colwise().sum().maxCoeff();
  if (!(rc > 1e-13) || !(inv_norm > 1e-13) || !std::isfinite(rc)) {
    throw SingularSystem(std::string(what) + ": I - K is numerically singular (rcond " + std::to_string(rc) + ")");
  }
  return lu;
}

void require(const std::shared_ptr<const Discretization>& disc) {
  if (!disc) throw std::invalid_argument("OcSolution: no discretization");
}

}  // namespace

OcSolution solve_arl(std::shared_ptr<const Discretization> disc) {
  require(disc);
  OcSolution s;
  const auto n = static_cast<Eigen::Index>(disc->quadrature().size());
  s.arl = factor(disc->matrix(Regime::PreChange), "ARL").solve(Eigen::VectorXd::Ones(n));
  s.disc = std::move(disc);
  return s;
}

OcSolution solve_add0(std::shared_ptr<const Discretization> disc) {
  require(disc);
  OcSolution s;
  const auto n = static_cast<Eigen::Index>(disc->quadrature().size());
  s.add0 = factor(disc->matrix(Regime::PostChange), "ADD_0").solve(Eigen::VectorXd::Ones(n));
  s.disc = std::move(disc);
  return s;
}

OcSolution solve_iadd(std::shared_ptr<const Discretization> disc) {
  require(disc);
  OcSolution s;
  const auto n = static_cast<Eigen::Index>(disc->quadrature().size());
  const auto lu = factor(disc->matrix(Regime::PreChange), "ARL");
  s.arl = lu.solve(Eigen::VectorXd::Ones(n));
  s.add0 = factor(disc->matrix(Regime::PostChange), "ADD_0").solve(Eigen::VectorXd::Ones(n));
  s.iadd = lu.solve(s.add0);
  s.disc = std::move(disc);
  return s;
}

OcSolution solve_arl(const KernelSpec& kernel, const Quadrature& quad) { return solve_arl(discretize(kernel, quad)); }
OcSolution solve_add0(const KernelSpec& kernel, const Quadrature& quad) { return solve_add0(discretize(kernel, quad)); }
OcSolution solve_iadd(const KernelSpec& kernel, const Quadrature& quad) { return solve_iadd(discretize(kernel, quad)); }

double OcSolution::arl_at(double x) const {
  if (arl.size() == 0) throw std::logic_error("OcSolution: ARL not solved");
  return 1.0 + disc->row(x, Regime::PreChange).dot(arl);
}

double OcSolution::add0_at(double x) const {
  if (add0.size() == 0) throw std::logic_error("OcSolution: ADD_0 not solved");
  return 1.0 + disc->row(x, Regime::PostChange).dot(add0);
}

double OcSolution::iadd_at(double x) const {
  if (iadd.size() == 0) throw std::logic_error("OcSolution: integral delay not solved");
  return add0_at(x) + disc->row(x, Regime::PreChange).dot(iadd);
}

DelayCurve iterate_rho_delta(const OcSolution& solution, double x0, const DelayPolicy& policy) {
  if (solution.add0.size() == 0) throw std::invalid_argument("iterate_rho_delta: solution lacks ADD_0");
  const Eigen::MatrixXd& k = solution.disc->matrix(Regime::PreChange);
  const Eigen::RowVectorXd r0 = solution.disc->row(x0, Regime::PreChange);

  DelayCurve curve;
  SupremumTracker tracker(policy);
  Eigen::VectorXd rho = Eigen::VectorXd::Ones(k.rows());
  Eigen::VectorXd delta = solution.add0;
  double log_scale = 0.0;

  curve.rho.push_back(1.0);
  curve.delta.push_back(solution.add0_at(x0));
  curve.add.push_back(curve.delta.back());
  bool done = tracker.record(0, curve.add.back(), delta.maxCoeff(), delta.minCoeff());
  for (int step = 1; !done; ++step) {
    const double r = r0.dot(rho);
    const double d = r0.dot(delta);
    if (!(r > 0.0)) break;  // start state leads straight past the threshold
    const double scale = std::exp(log_scale);
    curve.rho.push_back(r * scale);
    curve.delta.push_back(d * scale);
    curve.add.push_back(d / r);

    const double s = rho.maxCoeff();
    rho = k * rho / s;
    delta = k * delta / s;
    log_scale += std::log(s);
    const Eigen::ArrayXd nodal = delta.array() / rho.array();
    done = tracker.record(step, curve.add.back(), nodal.maxCoeff(), nodal.minCoeff());
  }
  curve.sup = tracker.sup();
  curve.k_at_sup = tracker.argmax();
  curve.stabilized = tracker.stabilized();
  curve.plateau = tracker.plateau();
  return curve;
}

PerformanceProfile kernel_profile(const KernelSpec& kernel, const Quadrature& quad, double x0,
                                  const DelayPolicy& policy) {
  const OcSolution sol = solve_iadd(discretize(kernel, quad));
  const DelayCurve curve = iterate_rho_delta(sol, x0, policy);
  PerformanceProfile p;
  p.arl = sol.arl_at(x0);
  p.psi = sol.iadd_at(x0);
  p.stadd = p.psi / p.arl;
  p.add = curve.add;
  p.sadd = curve.sup;
  p.k_at_sup = curve.k_at_sup;
  p.stabilized = curve.stabilized;
  p.plateau = curve.plateau;
  p.degenerate = curve.add.size() == 1 && sol.disc->row(x0, Regime::PreChange).isZero();
  p.delay_method = DelayMethod::Nystrom;
  return p;
}

Quadrature default_sr_quadrature(double threshold) {
  const int panels = std::max(30, static_cast<int>(std::ceil(4.0 * std::log1p(threshold))));
  return Quadrature::log_graded(threshold, panels, 10);
}

PerformanceProfile srr_profile(const ExpChangeModel& model, double threshold, double r, const Quadrature& quad,
                               const DelayPolicy& policy) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("srr_profile: r must be >= 0");
  return kernel_profile(sr_kernel(model, threshold), quad, r, policy);
}

PerformanceProfile srr_profile(const ExpChangeModel& model, double threshold, double r, const DelayPolicy& policy) {
  return srr_profile(model, threshold, r, default_sr_quadrature(threshold), policy);
}

}  // namespace ewmaopt
