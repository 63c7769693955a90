#pragma once

// Nystrom solver for the operating-characteristic integral equations of any
// detection statistic whose transition is y = next_state(x, X) with X an
// exponential observation. Used for the SR and SR-r benchmarks and as an
// independent check on the EWMA closed forms.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ewmaopt/exp_model.hpp"
#include "ewmaopt/performance.hpp"

namespace ewmaopt {

/// Markov transition kernel of a detection statistic on [0, A).
///
/// kernel_pre/kernel_post are the transition densities in y under P_inf and
/// P_0. The quadrature integrates in observation space instead: for state x,
/// the next state is next_state(x, X) with X drawn from data_model, and
/// observation_for(x, y) inverts that map (negative below the support).
struct KernelSpec {
  double threshold = 0.0;
  std::function<double(double, double)> kernel_pre;
  std::function<double(double, double)> kernel_post;
  std::function<double(double)> support_lower;
  std::function<double(double, double)> next_state;
  std::function<double(double, double)> observation_for;
  ExpChangeModel data_model{1.0};

  [[nodiscard]] double kernel(Regime regime, double x, double y) const {
    return regime == Regime::PreChange ? kernel_pre(x, y) : kernel_post(x, y);
  }
};

/// EWMA statistic Z' = (1 - lambda) Z + lambda X.
KernelSpec ewma_kernel(const ExpChangeModel& model, double lambda, double threshold);

/// SR statistic R' = (1 + R) Lambda(X). The likelihood ratio uses
/// statistic_model; observations follow data_model (they differ only when
/// studying a mis-designed SR procedure).
KernelSpec sr_kernel(const ExpChangeModel& statistic_model, const ExpChangeModel& data_model, double threshold);
KernelSpec sr_kernel(const ExpChangeModel& model, double threshold);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int order);

/// Composite Gauss-Legendre rule on [0, A): `order` nodes in each panel.
/// The nodal values of a solution are interpolated inside each panel by the
/// Lagrange polynomial through that panel's nodes.
class Quadrature {
 public:
  static Quadrature composite(std::vector<double> breaks, int order);
  static Quadrature uniform(double threshold, int panels, int order);
  /// Panels uniform in log(1 + y); suits statistics that grow geometrically.
  static Quadrature log_graded(double threshold, int panels, int order);

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<double>& breaks() const noexcept { return breaks_; }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] double upper() const noexcept { return breaks_.back(); }

  [[nodiscard]] int panel_of(double y) const;
  /// Lagrange weights of the panel's nodes at y (y inside that panel).
  void lagrange_weights(int panel, double y, std::span<double> out) const;

 private:
  std::vector<double> breaks_;
  int order_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> ref_nodes_;
  std::vector<double> bary_;
};

/// Observation-space integration settings for assembling one operator row.
struct RowIntegration {
  int order = 8;             ///< Gauss-Legendre points per sub-interval
  double max_width = 1.0;    ///< sub-interval length in units of the observation mean
  double tail_cutoff = 50.0; ///< ignore observations beyond this many means
};

/// Discretized transition operators under both measures.
class Discretization {
 public:
  Discretization(KernelSpec kernel, Quadrature quad, RowIntegration rule = {});

  [[nodiscard]] const KernelSpec& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const Quadrature& quadrature() const noexcept { return quad_; }
  [[nodiscard]] double threshold() const noexcept { return kernel_.threshold; }
  [[nodiscard]] const Eigen::MatrixXd& matrix(Regime regime) const noexcept {
    return regime == Regime::PreChange ? pre_ : post_;
  }

  /// Integration row at an arbitrary state x: row(x) * u approximates
  /// the integral of kernel(x, y) u(y) over [0, A).
  [[nodiscard]] Eigen::RowVectorXd row(double x, Regime regime) const;

 private:
  KernelSpec kernel_;
  Quadrature quad_;
  RowIntegration rule_;
  GaussLegendre sub_rule_;
  Eigen::MatrixXd pre_;
  Eigen::MatrixXd post_;
};

/// Nodal solutions of the ARL, ADD_0 and integral-delay equations. Off-node
/// values come from the equation itself (Nystrom interpolation).
struct OcSolution {
  std::shared_ptr<const Discretization> disc;
  Eigen::VectorXd arl;
  Eigen::VectorXd add0;
  Eigen::VectorXd iadd;

  [[nodiscard]] double arl_at(double x) const;
  [[nodiscard]] double add0_at(double x) const;
  [[nodiscard]] double iadd_at(double x) const;
  [[nodiscard]] double stadd_at(double x) const { return iadd_at(x) / arl_at(x); }
};

std::shared_ptr<const Discretization> discretize(const KernelSpec& kernel, const Quadrature& quad);

OcSolution solve_arl(std::shared_ptr<const Discretization> disc);
OcSolution solve_add0(std::shared_ptr<const Discretization> disc);
/// Solves all three equations; the integral delay uses ADD_0 as right-hand side.
OcSolution solve_iadd(std::shared_ptr<const Discretization> disc);

OcSolution solve_arl(const KernelSpec& kernel, const Quadrature& quad);
OcSolution solve_add0(const KernelSpec& kernel, const Quadrature& quad);
OcSolution solve_iadd(const KernelSpec& kernel, const Quadrature& quad);

/// rho_k, delta_k and ADD_k = delta_k / rho_k at one start state.
struct DelayCurve {
  std::vector<double> rho;
  std::vector<double> delta;
  std::vector<double> add;
  double sup = 0.0;
  int k_at_sup = 0;
  bool stabilized = false;
  double plateau = 0.0;
};

/// Applies the pre-change operator repeatedly to rho (from 1) and delta (from
/// ADD_0). `solution` must carry add0.
DelayCurve iterate_rho_delta(const OcSolution& solution, double x0, const DelayPolicy& policy = {});

/// Full profile (ARL, ADD_k, SADD, STADD) of a kernel started at x0.
PerformanceProfile kernel_profile(const KernelSpec& kernel, const Quadrature& quad, double x0,
                                  const DelayPolicy& policy = {});

/// Default grid for SR-type kernels.
Quadrature default_sr_quadrature(double threshold);

/// SR-r procedure started at r (r = 0 is the plain SR procedure).
PerformanceProfile srr_profile(const ExpChangeModel& model, double threshold, double r,
                               const Quadrature& quad, const DelayPolicy& policy = {});
PerformanceProfile srr_profile(const ExpChangeModel& model, double threshold, double r,
                               const DelayPolicy& policy = {});

}  // namespace ewmaopt
