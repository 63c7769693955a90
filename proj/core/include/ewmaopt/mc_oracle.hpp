#pragma once

// Monte Carlo estimates of ARL, ADD and STADD for EWMA, SR and SR-r
// procedures. Used only as an independent check on the deterministic
// solvers; results are reproducible for a fixed seed and any thread count.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "ewmaopt/exp_model.hpp"
#include "ewmaopt/random.hpp"

namespace ewmaopt {

enum class ProcedureKind { Ewma, Sr, Srr };

/// What to simulate. `start` is the EWMA headstart z or the SR-r start r.
/// SR procedures build their likelihood ratio from statistic_theta.
struct ProcedureSpec {
  ProcedureKind kind = ProcedureKind::Ewma;
  double lambda = 1.0;
  double start = 0.0;
  double threshold = 0.0;
  double statistic_theta = 1.0;

  static ProcedureSpec ewma(double lambda, double headstart, double threshold);
  static ProcedureSpec sr(double threshold, double statistic_theta);
  static ProcedureSpec srr(double r, double threshold, double statistic_theta);

  /// A >= 0 is accepted (A = 0 stops at the first observation).
  void validate() const;
};

struct McConfig {
  std::size_t replications = 100000;
  std::uint64_t seed = 20240611;
  /// Runs are truncated at this many observations and counted as cap hits.
  std::uint64_t horizon_cap = 10000000;
  /// Estimates are flagged when cap_hits / replications exceeds this.
  double cap_fraction = 1e-3;
  /// Conditioning needs at least this many runs surviving past the change.
  std::size_t min_survivors = 1000;
  unsigned threads = 0;

  void validate() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replications_used = 0;
  std::size_t cap_hits = 0;
  std::size_t discarded = 0;
  bool flagged = false;
};

struct RunOutcome {
  std::uint64_t stop_time = 0;
  bool capped = false;
};

/// One run. Observations 1..change_point are pre-change and later ones
/// post-change; no change_point means the change never happens.
RunOutcome run_once(const ProcedureSpec& spec, const ExpChangeModel& model, Xoshiro256ss& rng,
                    std::optional<std::uint64_t> change_point, std::uint64_t horizon_cap);

McEstimate estimate_arl(const ProcedureSpec& spec, const ExpChangeModel& model, const McConfig& config = {});

/// E_nu[T - nu | T > nu]; change_point = 0 gives ADD_0. Throws
/// InsufficientConditioning when fewer than min_survivors runs pass nu.
McEstimate estimate_add(const ProcedureSpec& spec, const ExpChangeModel& model, std::uint64_t change_point,
                        const McConfig& config = {});

/// Multi-cyclic delay: the procedure restarts from its start state after
/// every false alarm, the change occurs after `change_point` observations,
/// and the delay to the next alarm is recorded. For large change_point this
/// converges to the stationary average delay.
McEstimate estimate_stadd(const ProcedureSpec& spec, const ExpChangeModel& model, std::uint64_t change_point,
                          const McConfig& config = {});

}  // namespace ewmaopt
