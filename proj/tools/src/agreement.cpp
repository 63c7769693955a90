#include <cmath>

#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/mc_oracle.hpp"
#include "ewmaopt/oc_fredholm.hpp"
#include "ewmaopt_cli/tables.hpp"

namespace ewmaopt::cli {

std::vector<AgreementRow> three_way_agreement(const AgreementOptions& opts) {
  std::vector<AgreementRow> rows;
  std::uint64_t design_index = 0;
  for (double theta : opts.thetas) {
    const ExpChangeModel model(theta);
    for (double lambda : opts.lambdas) {
      for (double z : opts.headstarts) {
        for (double a : opts.thresholds) {
          const EwmaDesign d(lambda, z, a);
          const OcSolution sol = solve_iadd(ewma_kernel(model, lambda, a), Quadrature::uniform(a, 20, 10));
          const double l_an = arl(d);
          const double d_an = add0(d, model);
          const double s_an = stadd(d, model);
          const double l_q = sol.arl_at(z);
          const double d_q = sol.add0_at(z);
          const double s_q = sol.stadd_at(z);

          const ProcedureSpec proc = ProcedureSpec::ewma(lambda, z, a);
          McConfig mc;
          mc.replications = opts.replications;
          mc.threads = opts.threads;
          mc.horizon_cap = static_cast<std::uint64_t>(std::ceil(100.0 * l_an)) + 100;
          mc.seed = opts.seed + 3 * design_index;
          const McEstimate l_mc = estimate_arl(proc, model, mc);
          mc.seed += 1;
          const McEstimate d_mc = estimate_add(proc, model, 0, mc);
          mc.seed += 1;
          const auto nu = static_cast<std::uint64_t>(std::ceil(20.0 * l_an));
          const McEstimate s_mc = estimate_stadd(proc, model, nu, mc);
          ++design_index;

          auto push = [&](const char* q, double an, double quad, const McEstimate& e) {
            AgreementRow r{lambda, z, a, theta, q, an, quad, e.mean, e.std_error, std::abs(quad - an) / std::abs(an),
                           false, false};
            r.deterministic_ok = r.rel_diff < opts.rel_tol;
            const double band = opts.se_multiple * e.std_error;
            r.mc_ok = !e.flagged && std::abs(e.mean - an) <= band && std::abs(e.mean - quad) <= band;
            rows.push_back(r);
          };
          push("arl", l_an, l_q, l_mc);
          push("add0", d_an, d_q, d_mc);
          push("stadd", s_an, s_q, s_mc);
          // psi itself has no direct Monte Carlo estimate; its MC check is the stadd row.
          const double p_an = psi(d, model);
          const double p_q = sol.iadd_at(z);
          AgreementRow pr{lambda, z, a, theta, "psi", p_an, p_q, std::nan(""), std::nan(""),
                          std::abs(p_q - p_an) / std::abs(p_an), false, true};
          pr.deterministic_ok = pr.rel_diff < opts.rel_tol;
          rows.push_back(pr);
        }
      }
    }
  }
  return rows;
}

CsvTable agreement_csv(const std::vector<AgreementRow>& rows) {
  CsvTable t{"selftest",
             {"lambda", "z", "A", "theta", "quantity", "analytic", "quadrature", "mc", "mc_se", "rel_diff",
              "deterministic_ok", "mc_ok"},
             {}};
  for (const auto& r : rows) {
    t.add({fmt(r.lambda), fmt(r.z), fmt(r.A), fmt(r.theta), r.quantity, fmt(r.analytic), fmt(r.quadrature), fmt(r.mc),
           fmt(r.mc_se), fmt(r.rel_diff), r.deterministic_ok ? "1" : "0", r.mc_ok ? "1" : "0"});
  }
  return t;
}

}  // namespace ewmaopt::cli
