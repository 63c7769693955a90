#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ewmaopt/design_optimizer.hpp"
#include "ewmaopt_cli/csv.hpp"

namespace ewmaopt::cli {

/// Tables compare EWMA optimized in lambda for z = 0, z = 1 and free z
/// against the SR-r (SADD) or SR (STADD) benchmark.
struct TableSpec {
  std::string id;
  double theta;
  Objective objective;
};

TableSpec table_spec(std::string_view id);

struct TableCell {
  std::string procedure;  ///< EWMA, SR-r or SR
  std::string z_mode;     ///< 0, 1, opt (empty for benchmarks)
  double gamma = 0.0;
  std::string metric;
  double value;
  double A;
  double lambda;
  double z;
  double r;
  std::string error;
};

std::vector<TableCell> compute_table(std::string_view id, const OptimizerOptions& opts = {});
CsvTable table_csv(std::string_view id, const std::vector<TableCell>& cells);

inline const std::vector<double>& table_gammas() {
  static const std::vector<double> g{1e2, 1e3, 1e4};
  return g;
}

/// Plot data for figures 1..5 (one or more CSV tables).
std::vector<CsvTable> compute_figure(int id, const RunConfig& config);

/// Analytic vs Nystrom vs Monte Carlo on a fixed design grid.
struct AgreementOptions {
  std::vector<double> lambdas{0.15, 0.4, 0.8};
  std::vector<double> headstarts{0.0, 0.5, 1.0};
  std::vector<double> thresholds{1.0, 1.3, 1.6};
  std::vector<double> thetas{0.5, 1.0};
  std::size_t replications = 100000;
  std::uint64_t seed = 20240611;
  unsigned threads = 0;
  double rel_tol = 1e-4;
  double se_multiple = 3.0;
};

struct AgreementRow {
  double lambda;
  double z;
  double A;
  double theta;
  std::string quantity;  ///< arl, add0, or stadd (psi / ARL)
  double analytic;
  double quadrature;
  double mc;
  double mc_se;
  double rel_diff;
  bool deterministic_ok;
  bool mc_ok;
};

std::vector<AgreementRow> three_way_agreement(const AgreementOptions& opts);
CsvTable agreement_csv(const std::vector<AgreementRow>& rows);

}  // namespace ewmaopt::cli
