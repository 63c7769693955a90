#include "ewmaopt/mc_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewmaopt/errors.hpp"
#include "ewmaopt/parallel.hpp"

namespace ewmaopt {

ProcedureSpec ProcedureSpec::ewma(double lambda, double headstart, double threshold) {
  ProcedureSpec s;
  s.kind = ProcedureKind::Ewma;
  s.lambda = lambda;
  s.start = headstart;
  s.threshold = threshold;
  s.validate();
  return s;
}

ProcedureSpec ProcedureSpec::sr(double threshold, double statistic_theta) {
  return srr(0.0, threshold, statistic_theta);
}

ProcedureSpec ProcedureSpec::srr(double r, double threshold, double statistic_theta) {
  ProcedureSpec s;
  s.kind = r == 0.0 ? ProcedureKind::Sr : ProcedureKind::Srr;
  s.start = r;
  s.threshold = threshold;
  s.statistic_theta = statistic_theta;
  s.validate();
  return s;
}

void ProcedureSpec::validate() const {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("ProcedureSpec: threshold must be >= 0, got " + std::to_string(threshold));
  }
  if (!(start >= 0.0) || !std::isfinite(start)) {
    throw std::invalid_argument("ProcedureSpec: start state must be >= 0, got " + std::to_string(start));
  }
  if (kind == ProcedureKind::Ewma) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
      throw std::invalid_argument("ProcedureSpec: lambda must lie in (0, 1], got " + std::to_string(lambda));
    }
  } else if (!(statistic_theta > 0.0) || !std::isfinite(statistic_theta)) {
    throw std::invalid_argument("ProcedureSpec: SR statistic theta must be positive");
  }
}

void McConfig::validate() const {
  if (replications < 2) throw std::invalid_argument("McConfig: need at least 2 replications");
  if (horizon_cap < 1) throw std::invalid_argument("McConfig: horizon_cap must be >= 1");
  if (!(cap_fraction >= 0.0)) throw std::invalid_argument("McConfig: cap_fraction must be >= 0");
}

namespace {

class Stepper {
 public:
  explicit Stepper(const ProcedureSpec& s)
      : ewma_(s.kind == ProcedureKind::Ewma),
        alpha_(1.0 - s.lambda),
        lambda_(s.lambda),
        slope_(s.statistic_theta / (1.0 + s.statistic_theta)),
        scale_(1.0 / (1.0 + s.statistic_theta)),
        threshold_(s.threshold),
        start_(s.start),
        state_(s.start) {}

  void reset() noexcept { state_ = start_; }

  /// Feeds one observation; true when the alarm fires.
  bool step(double x) noexcept {
    if (ewma_) {
      state_ = alpha_ * state_ + lambda_ * x;
    } else {
      state_ = (1.0 + state_) * std::exp(slope_ * x) * scale_;
    }
    return state_ >= threshold_;
  }

 private:
  bool ewma_;
  double alpha_;
  double lambda_;
  double slope_;
  double scale_;
  double threshold_;
  double start_;
  double state_;
};

constexpr double kDiscarded = std::numeric_limits<double>::quiet_NaN();

McEstimate summarize(const std::vector<double>& raw, const std::vector<unsigned char>& capped, const McConfig& cfg) {
  std::vector<double> kept;
  kept.reserve(raw.size());
  McEstimate e;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw[i])) {
      ++e.discarded;
      continue;
    }
    kept.push_back(raw[i]);
    if (capped[i]) ++e.cap_hits;
  }
  e.replications_used = kept.size();
  if (kept.empty()) return e;
  const auto n = static_cast<double>(kept.size());
  e.mean = pairwise_sum(kept) / n;
  std::vector<double> sq(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) sq[i] = (kept[i] - e.mean) * (kept[i] - e.mean);
  const double var = kept.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  e.std_error = std::sqrt(var / n);
  e.flagged = static_cast<double>(e.cap_hits) > cfg.cap_fraction * n;
  return e;
}

template <class PerRun>
McEstimate simulate(const ProcedureSpec& spec, const McConfig& cfg, PerRun per_run) {
  spec.validate();
  cfg.validate();
  std::vector<double> raw(cfg.replications);
  std::vector<unsigned char> capped(cfg.replications, 0);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t begin, std::size_t end) {
    Stepper stepper(spec);
    for (std::size_t i = begin; i < end; ++i) {
      Xoshiro256ss rng = Xoshiro256ss::for_stream(cfg.seed, i);
      stepper.reset();
      bool hit = false;
      raw[i] = per_run(stepper, rng, hit);
      capped[i] = hit ? 1 : 0;
    }
  });
  return summarize(raw, capped, cfg);
}

}  // namespace

RunOutcome run_once(const ProcedureSpec& spec, const ExpChangeModel& model, Xoshiro256ss& rng,
                    std::optional<std::uint64_t> change_point, std::uint64_t horizon_cap) {
  spec.validate();
  Stepper stepper(spec);
  for (std::uint64_t n = 1; n <= horizon_cap; ++n) {
    const bool post = change_point && n > *change_point;
    const double x = model.sample(post ? Regime::PostChange : Regime::PreChange, rng);
    if (stepper.step(x)) return {n, false};
  }
  return {horizon_cap, true};
}

McEstimate estimate_arl(const ProcedureSpec& spec, const ExpChangeModel& model, const McConfig& config) {
  return simulate(spec, config, [&](Stepper& st, Xoshiro256ss& rng, bool& hit) {
    for (std::uint64_t n = 1; n <= config.horizon_cap; ++n) {
      if (st.step(model.sample(Regime::PreChange, rng))) return static_cast<double>(n);
    }
    hit = true;
    return static_cast<double>(config.horizon_cap);
  });
}

McEstimate estimate_add(const ProcedureSpec& spec, const ExpChangeModel& model, std::uint64_t change_point,
                        const McConfig& config) {
  McEstimate e = simulate(spec, config, [&](Stepper& st, Xoshiro256ss& rng, bool& hit) {
    for (std::uint64_t n = 1; n <= change_point; ++n) {
      if (st.step(model.sample(Regime::PreChange, rng))) return kDiscarded;
    }
    for (std::uint64_t d = 1; d <= config.horizon_cap; ++d) {
      if (st.step(model.sample(Regime::PostChange, rng))) return static_cast<double>(d);
    }
    hit = true;
    return static_cast<double>(config.horizon_cap);
  });
  if (e.replications_used < config.min_survivors) {
    throw InsufficientConditioning("only " + std::to_string(e.replications_used) + " of " +
                                   std::to_string(config.replications) + " runs survived past the change-point");
  }
  return e;
}

McEstimate estimate_stadd(const ProcedureSpec& spec, const ExpChangeModel& model, std::uint64_t change_point,
                          const McConfig& config) {
  return simulate(spec, config, [&](Stepper& st, Xoshiro256ss& rng, bool& hit) {
    for (std::uint64_t n = 1; n <= change_point; ++n) {
      if (st.step(model.sample(Regime::PreChange, rng))) st.reset();
    }
    for (std::uint64_t d = 1; d <= config.horizon_cap; ++d) {
      if (st.step(model.sample(Regime::PostChange, rng))) return static_cast<double>(d);
    }
    hit = true;
    return static_cast<double>(config.horizon_cap);
  });
}

}  // namespace ewmaopt
