#include "stochalloc/gillespie.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <thread>

#include "stochalloc/error.hpp"
#include "stochalloc/rng.hpp"

namespace stochalloc {
namespace {

void check_initial(const RateParams& p, const PopulationState& x0) {
  if (x0.size() != p.task_count()) {
    throw Error(ErrorCode::kInvalidInitialState, "initial state has " + std::to_string(x0.size()) +
                                                     " tasks, model has " +
                                                     std::to_string(p.task_count()));
  }
  for (int c : x0.counts) {
    if (c < 0) throw Error(ErrorCode::kInvalidInitialState, "initial state has a negative count");
  }
}

void check_horizon(double t_end) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::kValidationError, "t_end must be positive and finite");
  }
}

template <typename RunFn>
std::vector<Trace> run_parallel(std::size_t n_runs, unsigned threads, RunFn run) {
  std::vector<Trace> traces(n_runs);
  if (n_runs == 0) return traces;
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_runs));
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n_runs; i += threads) traces[i] = run(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

}  // namespace

PopulationState Trace::final_state() const {
  PopulationState x = initial;
  for (const auto& ev : events) {
    --x.counts[ev.from];
    ++x.counts[ev.to];
  }
  return x;
}

Trace ssa_run(const RateParams& p, const PopulationState& x0, double t_end, std::uint64_t seed) {
  check_initial(p, x0);
  check_horizon(t_end);

  Trace trace{x0, {}, t_end, seed};
  Rng rng(seed);
  const TaskGraph& g = p.graph();
  const auto edges = g.ordered_edges();
  std::vector<int> x = x0.counts;
  std::vector<double> prop(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) prop[e] = folded_propensity(p, x, e);

  double t = 0.0;
  while (true) {
    double total = 0.0;
    for (double a : prop) total += a;
    if (!(total > 0.0)) break;  // absorbing: nothing fires before t_end
    t += rng.exponential(total);
    if (t > t_end) break;

    const double target = rng.uniform() * total;
    std::size_t chosen = edges.size();
    double cumulative = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (prop[e] <= 0.0) continue;
      chosen = e;
      cumulative += prop[e];
      if (target < cumulative) break;
    }

    const OrderedEdge move = edges[chosen];
    --x[move.from];
    ++x[move.to];
    trace.events.push_back({t, move.from, move.to});

    // Only edges incident to the two touched tasks change.
    for (TaskId v : {move.from, move.to}) {
      for (std::size_t e : g.outgoing(v)) prop[e] = folded_propensity(p, x, e);
      for (std::size_t e : g.incoming(v)) prop[e] = folded_propensity(p, x, e);
    }
  }
  return trace;
}

std::vector<Trace> ssa_ensemble(const RateParams& p, const PopulationState& x0, double t_end,
                                std::size_t n_runs, std::uint64_t base_seed, unsigned threads) {
  check_initial(p, x0);
  check_horizon(t_end);
  return run_parallel(n_runs, threads,
                      [&](std::size_t i) { return ssa_run(p, x0, t_end, base_seed + i); });
}

Trace agent_sim_run(const RateParams& p, const PopulationState& x0, double t_end, double dt,
                    std::uint64_t seed, const WarningSink& warn) {
  check_initial(p, x0);
  check_horizon(t_end);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidTimestep, "agent simulator needs dt > 0");
  }

  Trace trace{x0, {}, t_end, seed};
  Rng rng(seed);
  const TaskGraph& g = p.graph();
  const auto edges = g.ordered_edges();
  const std::size_t m = p.task_count();
  std::vector<int> x = x0.counts;
  std::vector<int> delta(m, 0);
  std::vector<double> cumulative;
  bool warned = false;

  const auto steps = static_cast<long>(std::floor(t_end / dt + 1e-9));
  for (long step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    std::fill(delta.begin(), delta.end(), 0);
    for (TaskId i = 0; i < m; ++i) {
      if (x[i] == 0) continue;
      const auto out = g.outgoing(i);
      cumulative.assign(out.size(), 0.0);
      double sum = 0.0;
      double max_hazard = 0.0;
      for (std::size_t k = 0; k < out.size(); ++k) {
        const double hazard = folded_propensity(p, x, out[k]) / x[i];
        max_hazard = std::max(max_hazard, hazard);
        sum += hazard * dt;
        cumulative[k] = sum;
      }
      if (max_hazard * dt > 0.1 && !warned) {
        warned = true;
        const std::string msg = "agent simulator: per-robot hazard * dt = " +
                                std::to_string(max_hazard * dt) + " exceeds 0.1; reduce dt";
        if (warn) {
          warn(msg);
        } else {
          std::cerr << "warning: " << msg << '\n';
        }
      }
      if (sum > 1.0) {
        for (double& c : cumulative) c /= sum;
      }
      for (int robot = 0; robot < x[i]; ++robot) {
        const double u = rng.uniform();
        for (std::size_t k = 0; k < out.size(); ++k) {
          if (u < cumulative[k]) {
            const TaskId to = edges[out[k]].to;
            trace.events.push_back({t, i, to});
            --delta[i];
            ++delta[to];
            break;
          }
        }
      }
    }
    for (std::size_t i = 0; i < m; ++i) x[i] += delta[i];
  }
  return trace;
}

std::vector<Trace> agent_ensemble(const RateParams& p, const PopulationState& x0, double t_end,
                                  double dt, std::size_t n_runs, std::uint64_t base_seed,
                                  unsigned threads) {
  check_initial(p, x0);
  check_horizon(t_end);
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidTimestep, "agent simulator needs dt > 0");
  return run_parallel(n_runs, threads, [&](std::size_t i) {
    return agent_sim_run(p, x0, t_end, dt, base_seed + i, [](const std::string&) {});
  });
}

PopulationState state_at(const Trace& trace, double t) {
  if (!(t >= 0.0) || t > trace.t_end) {
    throw Error(ErrorCode::kOutOfRange,
                "t=" + std::to_string(t) + " outside [0, " + std::to_string(trace.t_end) + "]");
  }
  PopulationState x = trace.initial;
  for (const auto& ev : trace.events) {
    if (ev.time > t) break;
    --x.counts[ev.from];
    ++x.counts[ev.to];
  }
  return x;
}

bool replay_is_valid(const Trace& trace) {
  PopulationState x = trace.initial;
  const int total = x.total();
  double last = 0.0;
  for (const auto& ev : trace.events) {
    if (ev.time < last || ev.time > trace.t_end) return false;
    if (ev.from >= x.size() || ev.to >= x.size() || ev.from == ev.to) return false;
    last = ev.time;
    if (--x.counts[ev.from] < 0) return false;
    ++x.counts[ev.to];
  }
  return x.total() == total;
}

}  // namespace stochalloc
