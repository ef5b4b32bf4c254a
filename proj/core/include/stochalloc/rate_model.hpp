#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stochalloc/task_graph.hpp"

namespace stochalloc {

/// How the per-task variance gains enter the single-robot move i->j.
///
/// kSymmetric uses b_ij = b_ji = (beta_i + beta_j) / 2. The bilinear terms
/// then cancel in the net flow of every edge, so the mean dynamics are
/// exactly dE[X]/dt = K E[X] whatever beta is.
/// kDepartureSide uses b_ij = beta_i (the departing task's gain). It
/// reproduces the departure sum term by term but the mean drifts with beta
/// when neighbouring gains differ.
enum class BetaCoupling { kSymmetric, kDepartureSide };

/// Robot counts per task.
struct PopulationState {
  std::vector<int> counts;

  std::size_t size() const noexcept { return counts.size(); }
  int total() const noexcept;
  Eigen::VectorXd as_vector() const;
  friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

/// Per-ordered-edge rates r(i->j) >= 0 and per-task gains beta_i >= 0.
///
/// r(i->j) is the per-robot hazard of moving from i toward j. The gain
/// k_ab (entry K_ab of the gain matrix) corresponds to r(b->a).
class RateParams {
 public:
  /// `rates` is indexed by the graph's ordered-edge index.
  RateParams(TaskGraph graph, std::vector<double> rates, Eigen::VectorXd beta,
             BetaCoupling coupling = BetaCoupling::kSymmetric);

  /// Rates given as (from, to) -> value; absent ordered edges get 0.
  /// Throws kNotNeighbors for pairs that are not graph edges.
  static RateParams from_map(TaskGraph graph, const std::map<std::pair<TaskId, TaskId>, double>& rates,
                             Eigen::VectorXd beta,
                             BetaCoupling coupling = BetaCoupling::kSymmetric);

  const TaskGraph& graph() const noexcept { return graph_; }
  std::size_t task_count() const noexcept { return graph_.task_count(); }
  std::span<const double> rates() const noexcept { return rates_; }
  const Eigen::VectorXd& beta() const noexcept { return beta_; }
  BetaCoupling coupling() const noexcept { return coupling_; }

  /// r(from->to); throws kNotNeighbors when {from, to} is not an edge.
  double rate(TaskId from, TaskId to) const;
  double rate(std::size_t ordered_edge) const { return rates_.at(ordered_edge); }
  /// Bilinear coefficient b of an ordered edge under the coupling mode.
  double edge_coupling(std::size_t ordered_edge) const;

  RateParams with_beta(Eigen::VectorXd beta) const;
  RateParams with_coupling(BetaCoupling coupling) const;

 private:
  TaskGraph graph_;
  std::vector<double> rates_;
  Eigen::VectorXd beta_;
  BetaCoupling coupling_;
};

/// Signed propensity of one ordered edge at (possibly fractional) counts:
/// r * x_from - b * x_from * x_to.
double raw_edge_propensity(const RateParams& p, std::size_t ordered_edge, double x_from,
                           double x_to);

/// Aggregate departure rate out of task i: sum of raw per-edge propensities
/// i->j over neighbours. May be negative.
double departure_rate(const RateParams& p, const PopulationState& x, TaskId i);
/// Aggregate arrival rate into task i: sum of raw propensities j->i.
double arrival_rate(const RateParams& p, const PopulationState& x, TaskId i);
/// Raw propensity a(i->j). Throws kNotNeighbors.
double edge_propensity_raw(const RateParams& p, const PopulationState& x, TaskId i, TaskId j);

std::vector<double> raw_propensities(const RateParams& p, const PopulationState& x);

/// Non-negative propensities after reversing negative moves:
/// ~a(i->j) = max(a(i->j), 0) + max(-a(j->i), 0), indexed by ordered edge.
std::vector<double> folded_propensities(const RateParams& p, const PopulationState& x);
double folded_propensity(const RateParams& p, std::span<const int> counts, std::size_t ordered_edge);

/// Smallest raw propensity over ordered edges at the real-valued target xd.
double positivity_margin(const RateParams& p, const Eigen::VectorXd& xd);

/// Smallest raw propensity over every integer state with `robots` robots in
/// which the edge can fire (x_from >= 1). Positive means folding never occurs.
double reachable_positivity_margin(const RateParams& p, int robots);

}  // namespace stochalloc
