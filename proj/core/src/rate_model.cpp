#include "stochalloc/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "stochalloc/error.hpp"

namespace stochalloc {

int PopulationState::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

Eigen::VectorXd PopulationState::as_vector() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) v(static_cast<Eigen::Index>(i)) = counts[i];
  return v;
}

RateParams::RateParams(TaskGraph graph, std::vector<double> rates, Eigen::VectorXd beta,
                       BetaCoupling coupling)
    : graph_(std::move(graph)), rates_(std::move(rates)), beta_(std::move(beta)), coupling_(coupling) {
  if (rates_.size() != graph_.ordered_edges().size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(graph_.ordered_edges().size()) +
                    " ordered-edge rates, got " + std::to_string(rates_.size()));
  }
  if (static_cast<std::size_t>(beta_.size()) != graph_.task_count()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "beta has " + std::to_string(beta_.size()) + " entries for " +
                    std::to_string(graph_.task_count()) + " tasks");
  }
  for (double r : rates_) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kValidationError, "rates must be finite and non-negative");
    }
  }
  for (Eigen::Index i = 0; i < beta_.size(); ++i) {
    if (!(beta_(i) >= 0.0) || !std::isfinite(beta_(i))) {
      throw Error(ErrorCode::kValidationError, "beta must be finite and non-negative");
    }
  }
}

RateParams RateParams::from_map(TaskGraph graph,
                                const std::map<std::pair<TaskId, TaskId>, double>& rates,
                                Eigen::VectorXd beta, BetaCoupling coupling) {
  std::vector<double> dense(graph.ordered_edges().size(), 0.0);
  for (const auto& [key, value] : rates) {
    const auto e = graph.ordered_index(key.first, key.second);
    if (!e) {
      throw Error(ErrorCode::kNotNeighbors, "rate given for non-edge " + std::to_string(key.first) +
                                                "->" + std::to_string(key.second));
    }
    dense[*e] = value;
  }
  return RateParams(std::move(graph), std::move(dense), std::move(beta), coupling);
}

double RateParams::rate(TaskId from, TaskId to) const {
  const auto e = graph_.ordered_index(from, to);
  if (!e) {
    throw Error(ErrorCode::kNotNeighbors,
                "tasks " + std::to_string(from) + " and " + std::to_string(to) + " are not adjacent");
  }
  return rates_[*e];
}

double RateParams::edge_coupling(std::size_t ordered_edge) const {
  const OrderedEdge& e = graph_.ordered_edges()[ordered_edge];
  const auto from = static_cast<Eigen::Index>(e.from);
  const auto to = static_cast<Eigen::Index>(e.to);
  switch (coupling_) {
    case BetaCoupling::kSymmetric: return 0.5 * (beta_(from) + beta_(to));
    case BetaCoupling::kDepartureSide: return beta_(from);
  }
  return 0.0;
}

RateParams RateParams::with_beta(Eigen::VectorXd beta) const {
  return RateParams(graph_, rates_, std::move(beta), coupling_);
}

RateParams RateParams::with_coupling(BetaCoupling coupling) const {
  return RateParams(graph_, rates_, beta_, coupling);
}

namespace {

void check_state(const RateParams& p, std::span<const int> counts) {
  if (counts.size() != p.task_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "population state has " +
                                                   std::to_string(counts.size()) + " tasks, expected " +
                                                   std::to_string(p.task_count()));
  }
}

double raw_at(const RateParams& p, std::span<const int> counts, std::size_t e) {
  const OrderedEdge& oe = p.graph().ordered_edges()[e];
  return raw_edge_propensity(p, e, counts[oe.from], counts[oe.to]);
}

}  // namespace

double raw_edge_propensity(const RateParams& p, std::size_t ordered_edge, double x_from,
                           double x_to) {
  return p.rate(ordered_edge) * x_from - p.edge_coupling(ordered_edge) * x_from * x_to;
}

double departure_rate(const RateParams& p, const PopulationState& x, TaskId i) {
  check_state(p, x.counts);
  double sum = 0.0;
  for (std::size_t e : p.graph().outgoing(i)) sum += raw_at(p, x.counts, e);
  return sum;
}

double arrival_rate(const RateParams& p, const PopulationState& x, TaskId i) {
  check_state(p, x.counts);
  double sum = 0.0;
  for (std::size_t e : p.graph().incoming(i)) sum += raw_at(p, x.counts, e);
  return sum;
}

double edge_propensity_raw(const RateParams& p, const PopulationState& x, TaskId i, TaskId j) {
  check_state(p, x.counts);
  const auto e = p.graph().ordered_index(i, j);
  if (!e) {
    throw Error(ErrorCode::kNotNeighbors,
                "tasks " + std::to_string(i) + " and " + std::to_string(j) + " are not adjacent");
  }
  return raw_at(p, x.counts, *e);
}

std::vector<double> raw_propensities(const RateParams& p, const PopulationState& x) {
  check_state(p, x.counts);
  std::vector<double> out(p.graph().ordered_edges().size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = raw_at(p, x.counts, e);
  return out;
}

double folded_propensity(const RateParams& p, std::span<const int> counts, std::size_t e) {
  const double forward = raw_at(p, counts, e);
  const double backward = raw_at(p, counts, TaskGraph::reverse(e));
  return std::max(forward, 0.0) + std::max(-backward, 0.0);
}

std::vector<double> folded_propensities(const RateParams& p, const PopulationState& x) {
  check_state(p, x.counts);
  std::vector<double> out(p.graph().ordered_edges().size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = folded_propensity(p, x.counts, e);
  return out;
}

double positivity_margin(const RateParams& p, const Eigen::VectorXd& xd) {
  if (static_cast<std::size_t>(xd.size()) != p.task_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "target distribution has wrong length");
  }
  double margin = std::numeric_limits<double>::infinity();
  const auto edges = p.graph().ordered_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    margin = std::min(margin, raw_edge_propensity(p, e, xd(static_cast<Eigen::Index>(edges[e].from)),
                                                  xd(static_cast<Eigen::Index>(edges[e].to))));
  }
  return margin;
}

double reachable_positivity_margin(const RateParams& p, int robots) {
  double margin = std::numeric_limits<double>::infinity();
  const auto edges = p.graph().ordered_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    // x_from * (r - b x_to) is smallest with every other robot on x_to.
    for (int from = 1; from <= robots; ++from) {
      margin = std::min(margin, raw_edge_propensity(p, e, from, robots - from));
    }
  }
  return margin;
}

}  // namespace stochalloc
