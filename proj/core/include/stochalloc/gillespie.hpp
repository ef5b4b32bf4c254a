#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stochalloc/rate_model.hpp"

namespace stochalloc {

struct TransitionEvent {
  double time = 0.0;
  TaskId from = 0;
  TaskId to = 0;
  friend bool operator==(const TransitionEvent&, const TransitionEvent&) = default;
};

/// One realisation: the initial counts plus every single-robot move.
/// SSA traces have strictly increasing times; agent traces may hold several
/// moves at the same grid time.
struct Trace {
  PopulationState initial;
  std::vector<TransitionEvent> events;
  double t_end = 0.0;
  std::uint64_t seed = 0;

  PopulationState final_state() const;
  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Gillespie direct method on the folded propensities. Deterministic in
/// (inputs, seed). Throws kInvalidInitialState for a mis-sized or negative
/// x0 and kValidationError for t_end <= 0.
Trace ssa_run(const RateParams& p, const PopulationState& x0, double t_end, std::uint64_t seed);

/// Runs with seeds base_seed .. base_seed + n_runs - 1, spread over
/// `threads` workers (0 = hardware concurrency). Output is independent of
/// the thread count.
std::vector<Trace> ssa_ensemble(const RateParams& p, const PopulationState& x0, double t_end,
                                std::size_t n_runs, std::uint64_t base_seed, unsigned threads = 0);

using WarningSink = std::function<void(const std::string&)>;

/// Synchronous per-robot simulation on a dt grid: every robot at task i moves
/// to neighbour j with probability (~a(i->j) / x_i) dt evaluated at the
/// counts from the start of the step. Warns once through `warn` (stderr
/// when empty) if some per-robot hazard times dt exceeds 0.1; per-robot
/// probabilities summing above 1 are renormalised. Throws kInvalidTimestep
/// for dt <= 0.
Trace agent_sim_run(const RateParams& p, const PopulationState& x0, double t_end, double dt,
                    std::uint64_t seed, const WarningSink& warn = {});

std::vector<Trace> agent_ensemble(const RateParams& p, const PopulationState& x0, double t_end,
                                  double dt, std::size_t n_runs, std::uint64_t base_seed,
                                  unsigned threads = 0);

/// Right-continuous state at time t in [0, t_end]; throws kOutOfRange.
PopulationState state_at(const Trace& trace, double t);

/// True when replaying the trace never produces a negative count, keeps the
/// total, and times are non-decreasing within [0, t_end].
bool replay_is_valid(const Trace& trace);

}  // namespace stochalloc
