#include "ewmaopt_cli/commands.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "ewmaopt/design_optimizer.hpp"
#include "ewmaopt/errors.hpp"
#include "ewmaopt/ewma_analytic.hpp"
#include "ewmaopt/mc_oracle.hpp"
#include "ewmaopt/oc_fredholm.hpp"
#include "ewmaopt_cli/tables.hpp"

namespace ewmaopt::cli {

namespace {

enum class Proc { Ewma, Sr, Srr };

Proc parse_proc(const std::string& s) {
  if (s == "ewma") return Proc::Ewma;
  if (s == "sr") return Proc::Sr;
  if (s == "srr") return Proc::Srr;
  throw std::invalid_argument("--proc: expected ewma, sr or srr, got '" + s + "'");
}

double start_of(Proc proc, const RunConfig& cfg) {
  if (proc == Proc::Sr) return 0.0;
  return proc == Proc::Ewma ? cfg.number("z") : cfg.number("r");
}

double resolve_threshold(Proc proc, const RunConfig& cfg, const ExpChangeModel& model) {
  if (!cfg.is("A", "auto")) return cfg.number("A");
  const CalibrationTarget target{cfg.number("gamma"), 1e-9};
  if (proc == Proc::Ewma) return calibrate_ewma(cfg.number("lambda"), cfg.number("z"), target);
  return calibrate_srr(model, start_of(proc, cfg), target);
}

McConfig mc_config(const RunConfig& cfg, double reference_arl) {
  McConfig mc;
  mc.replications = cfg.count("reps");
  mc.seed = cfg.count("seed");
  mc.threads = static_cast<unsigned>(cfg.count("threads"));
  mc.horizon_cap = static_cast<std::uint64_t>(std::ceil(100.0 * reference_arl)) + 100;
  return mc;
}

ProcedureSpec procedure(Proc proc, const RunConfig& cfg, const ExpChangeModel& model, double a) {
  if (proc == Proc::Ewma) return ProcedureSpec::ewma(cfg.number("lambda"), cfg.number("z"), a);
  return ProcedureSpec::srr(start_of(proc, cfg), a, model.theta());
}

PerformanceProfile deterministic_profile(Proc proc, const RunConfig& cfg, const ExpChangeModel& model, double a,
                                         bool analytic, int kmax) {
  DelayPolicy policy;
  policy.min_k = kmax;
  if (proc == Proc::Ewma) {
    const double lambda = cfg.number("lambda");
    const double z = cfg.number("z");
    if (analytic) {
      ProfileOptions po;
      po.delay = policy;
      return profile(EwmaDesign(lambda, z, a), model, po);
    }
    return kernel_profile(ewma_kernel(model, lambda, a), Quadrature::uniform(a, 20, 10), z, policy);
  }
  if (analytic) throw std::invalid_argument("--method analytic is only available for --proc ewma");
  return srr_profile(model, a, start_of(proc, cfg), policy);
}

CsvTable cmd_evaluate(const RunConfig& cfg) {
  const Proc proc = parse_proc(cfg.get("proc"));
  const ExpChangeModel model(cfg.number("theta"));
  const double a = resolve_threshold(proc, cfg, model);
  const int kmax = static_cast<int>(cfg.count("kmax"));
  const std::string& method = cfg.get("method");
  if (method != "analytic" && method != "quadrature" && method != "mc" && method != "all") {
    throw std::invalid_argument("--method: expected analytic, quadrature, mc or all, got '" + method + "'");
  }
  CsvTable t{"evaluate", {"metric", "k", "method", "value", "std_error", "A"}, {}};
  double reference_arl = 0.0;
  auto deterministic = [&](bool analytic) {
    const char* tag = analytic ? "analytic" : "quadrature";
    const PerformanceProfile p = deterministic_profile(proc, cfg, model, a, analytic, kmax);
    reference_arl = p.arl;
    t.add({"ARL", "", tag, fmt(p.arl), "", fmt(a)});
    for (int k = 0; k <= kmax && k < static_cast<int>(p.add.size()); ++k) {
      t.add({"ADD", std::to_string(k), tag, fmt(p.add[static_cast<std::size_t>(k)]), "", fmt(a)});
    }
    t.add({"SADD", std::to_string(p.k_at_sup), tag, fmt(p.sadd), "", fmt(a)});
    t.add({"STADD", "", tag, fmt(p.stadd), "", fmt(a)});
  };
  const bool all = method == "all";
  if (all || method == "analytic") {
    if (proc == Proc::Ewma) {
      deterministic(true);
    } else if (!all) {
      throw std::invalid_argument("--method analytic is only available for --proc ewma");
    }
  }
  if (all || method == "quadrature") deterministic(false);
  if (all || method == "mc") {
    if (reference_arl == 0.0) {
      reference_arl = proc == Proc::Ewma ? arl(EwmaDesign(cfg.number("lambda"), cfg.number("z"), a))
                                         : solve_arl(sr_kernel(model, a), default_sr_quadrature(a)).arl_at(start_of(proc, cfg));
    }
    const ProcedureSpec spec = procedure(proc, cfg, model, a);
    const McConfig mc = mc_config(cfg, reference_arl);
    const McEstimate l = estimate_arl(spec, model, mc);
    t.add({"ARL", "", "mc", fmt(l.mean), fmt(l.std_error), fmt(a)});
    double sup = -1.0;
    int at = 0;
    double sup_se = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      const McEstimate e = estimate_add(spec, model, static_cast<std::uint64_t>(k), mc);
      t.add({"ADD", std::to_string(k), "mc", fmt(e.mean), fmt(e.std_error), fmt(a)});
      if (e.mean > sup) {
        sup = e.mean;
        at = k;
        sup_se = e.std_error;
      }
    }
    t.add({"SADD", std::to_string(at), "mc", fmt(sup), fmt(sup_se), fmt(a)});
    const double nu = cfg.count("nu") > 0 ? static_cast<double>(cfg.count("nu")) : std::ceil(20.0 * reference_arl);
    const McEstimate s = estimate_stadd(spec, model, static_cast<std::uint64_t>(nu), mc);
    t.add({"STADD", "", "mc", fmt(s.mean), fmt(s.std_error), fmt(a)});
  }
  return t;
}

CsvTable cmd_calibrate(const RunConfig& cfg) {
  const Proc proc = parse_proc(cfg.get("proc"));
  const ExpChangeModel model(cfg.number("theta"));
  const double gamma = cfg.number("gamma");
  const CalibrationTarget target{gamma, 1e-9};
  CsvTable t{"calibrate", {"proc", "gamma", "lambda", "z", "r", "A", "arl"}, {}};
  if (proc == Proc::Ewma) {
    const double lambda = cfg.number("lambda");
    const double z = cfg.number("z");
    const double a = calibrate_ewma(lambda, z, target);
    t.add({"ewma", fmt(gamma), fmt(lambda), fmt(z), "", fmt(a), fmt(arl(EwmaDesign(lambda, z, a)))});
  } else {
    const double r = start_of(proc, cfg);
    const double a = calibrate_srr(model, r, target);
    const double l = solve_arl(sr_kernel(model, a), default_sr_quadrature(a)).arl_at(r);
    t.add({cfg.get("proc"), fmt(gamma), "", "", fmt(r), fmt(a), fmt(l)});
  }
  return t;
}

CsvTable cmd_optimize(const RunConfig& cfg) {
  if (!cfg.is("proc", "ewma")) throw std::invalid_argument("optimize supports --proc ewma only");
  const ExpChangeModel model(cfg.number("theta"));
  const double gamma = cfg.number("gamma");
  const Objective obj = parse_objective(cfg.get("objective"));
  std::optional<double> z;
  if (!cfg.is("z", "free")) z = cfg.number("z");
  OptimizerOptions opts;
  opts.threads = static_cast<unsigned>(cfg.count("threads"));
  const DesignOptimum o = optimize_design(model, {gamma}, obj, z, opts);
  CsvTable t{"optimize",
             {"theta", "gamma", "objective", "z_mode", "lambda_star", "z_star", "A_star", "value", "arl", "evaluations"},
             {}};
  t.add({fmt(model.theta()), fmt(gamma), std::string(to_string(obj)), cfg.get("z"), fmt(o.lambda_star), fmt(o.z_star),
         fmt(o.A_star), fmt(o.value), fmt(o.profile.arl), std::to_string(o.evaluations)});
  return t;
}

CsvTable cmd_simulate(const RunConfig& cfg) {
  const Proc proc = parse_proc(cfg.get("proc"));
  const ExpChangeModel model(cfg.number("theta"));
  const double a = resolve_threshold(proc, cfg, model);
  const double reference_arl =
      proc == Proc::Ewma ? arl(EwmaDesign(cfg.number("lambda"), cfg.number("z"), a))
                         : solve_arl(sr_kernel(model, a), default_sr_quadrature(a)).arl_at(start_of(proc, cfg));
  const ProcedureSpec spec = procedure(proc, cfg, model, a);
  const McConfig mc = mc_config(cfg, reference_arl);
  const std::string& metric = cfg.get("metric");
  std::uint64_t nu = cfg.count("nu");
  McEstimate e;
  if (metric == "arl") {
    e = estimate_arl(spec, model, mc);
  } else if (metric == "add") {
    e = estimate_add(spec, model, nu, mc);
  } else if (metric == "stadd") {
    if (nu == 0) nu = static_cast<std::uint64_t>(std::ceil(20.0 * reference_arl));
    e = estimate_stadd(spec, model, nu, mc);
  } else {
    throw std::invalid_argument("--metric: expected arl, add or stadd, got '" + metric + "'");
  }
  std::cerr << "simulate: " << e.replications_used << " runs used, " << e.cap_hits << " cap hits, " << e.discarded
            << " discarded" << (e.flagged ? " (flagged)" : "") << "\n";
  CsvTable t{"simulate",
             {"proc", "metric", "A", "nu", "mean", "std_error", "replications", "cap_hits", "discarded", "flagged"},
             {}};
  t.add({cfg.get("proc"), metric, fmt(a), std::to_string(nu), fmt(e.mean), fmt(e.std_error),
         std::to_string(e.replications_used), std::to_string(e.cap_hits), std::to_string(e.discarded),
         e.flagged ? "1" : "0"});
  return t;
}

bool table_has_errors(const CsvTable& t) {
  const std::size_t col = t.header.size() - 1;
  for (const auto& row : t.rows) {
    if (!row[col].empty()) return true;
  }
  return false;
}

}  // namespace

CommandResult execute(const RunConfig& cfg) {
  const std::string& cmd = cfg.get("command");
  CommandResult result;
  if (cmd == "evaluate") {
    result.tables.push_back(cmd_evaluate(cfg));
  } else if (cmd == "calibrate") {
    result.tables.push_back(cmd_calibrate(cfg));
  } else if (cmd == "optimize") {
    result.tables.push_back(cmd_optimize(cfg));
  } else if (cmd == "simulate") {
    result.tables.push_back(cmd_simulate(cfg));
  } else if (cmd == "table") {
    const std::string& id = cfg.get("id");
    table_spec(id);
    OptimizerOptions opts;
    opts.threads = static_cast<unsigned>(cfg.count("threads"));
    result.tables.push_back(table_csv(id, compute_table(id, opts)));
    if (table_has_errors(result.tables.back())) result.exit_code = kPartialTable;
  } else if (cmd == "figure") {
    const std::string& id = cfg.get("id");
    if (id.size() != 1 || id[0] < '1' || id[0] > '5') {
      throw std::invalid_argument("figure id must be 1..5, got '" + id + "'");
    }
    result.tables = compute_figure(id[0] - '0', cfg);
  } else if (cmd == "selftest") {
    AgreementOptions opts;
    opts.replications = cfg.count("reps");
    opts.seed = cfg.count("seed");
    opts.threads = static_cast<unsigned>(cfg.count("threads"));
    const auto rows = three_way_agreement(opts);
    result.tables.push_back(agreement_csv(rows));
    for (const auto& r : rows) {
      if (!r.deterministic_ok || !r.mc_ok) result.exit_code = kNumericalFailure;
    }
  } else if (cmd.empty()) {
    throw std::invalid_argument("no command given (evaluate, table, figure, calibrate, optimize, simulate, selftest)");
  } else {
    throw std::invalid_argument("unknown command '" + cmd + "'");
  }
  return result;
}

int run(int argc, char** argv) {
  CLI::App app{"EWMA chart design for exponential data: evaluation, calibration, optimization, simulation"};
  std::string command;
  std::string id;
  app.add_option("command", command, "evaluate | table | figure | calibrate | optimize | simulate | selftest");
  app.add_option("id", id, "table id (1a, 1b, 2a, 2b) or figure id (1..5)");
  std::map<std::string, std::string> flags;
  for (const auto& key : config_keys()) {
    const std::string name = key.name;
    if (name == "command" || name == "id") continue;
    app.add_option("--" + name, flags[name], key.help);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidArguments;
  }

  try {
    RunConfig cfg;
    if (app.count("--config") > 0) cfg.load_file(flags["config"]);
    if (!command.empty()) cfg.set("command", command);
    if (!id.empty()) cfg.set("id", id);
    for (const auto& [name, value] : flags) {
      if (name != "config" && app.count("--" + name) > 0) cfg.set(name, value);
    }
    const CommandResult result = execute(cfg);
    emit(result.tables, cfg);
    return result.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidArguments;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace ewmaopt::cli
