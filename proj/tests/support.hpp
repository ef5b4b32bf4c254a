#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stochalloc/rate_model.hpp"
#include "stochalloc/task_graph.hpp"

namespace stochalloc::testing {

// Edges written 1-based, as in the documentation.
inline TaskGraph graph1(std::size_t m, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<std::pair<TaskId, TaskId>> e;
  for (auto [a, b] : edges) e.emplace_back(static_cast<TaskId>(a - 1), static_cast<TaskId>(b - 1));
  return TaskGraph::build(m, e);
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Rates keyed (from, to), 1-based.
inline RateParams params1(const TaskGraph& g, std::initializer_list<std::pair<std::pair<int, int>, double>> rates,
                          Eigen::VectorXd beta, BetaCoupling coupling = BetaCoupling::kSymmetric) {
  std::map<std::pair<TaskId, TaskId>, double> r;
  for (const auto& [key, value] : rates) {
    r[{static_cast<TaskId>(key.first - 1), static_cast<TaskId>(key.second - 1)}] = value;
  }
  return RateParams::from_map(g, r, std::move(beta), coupling);
}

inline RateParams two_task(double r12, double r21, double beta1, double beta2,
                           BetaCoupling coupling = BetaCoupling::kSymmetric) {
  return params1(graph1(2, {{1, 2}}), {{{1, 2}, r12}, {{2, 1}, r21}}, vec({beta1, beta2}), coupling);
}

// Published Example-1 gains k_ab loaded as r(b -> a).
inline RateParams printed_example1(Eigen::VectorXd beta = Eigen::VectorXd::Zero(4)) {
  return params1(graph1(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}}),
                 {{{2, 1}, 2.1}, {{4, 1}, 1.4}, {{1, 2}, 1.5}, {{3, 2}, 1.3},
                  {{2, 3}, 0.9}, {{4, 3}, 1.2}, {{1, 4}, 0.1}, {{3, 4}, 0.6}},
                 std::move(beta));
}

inline Eigen::VectorXd example1_target() { return vec({13, 9, 6, 2}); }
inline Eigen::VectorXd example1_beta() { return vec({0.05, 0.20, 0.11, 0.052}); }

// Random spanning tree plus extra edges with probability `density`.
inline TaskGraph random_connected_graph(std::size_t m, double density, std::mt19937_64& rng) {
  std::vector<std::pair<TaskId, TaskId>> edges;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (TaskId v = 1; v < m; ++v) {
    std::uniform_int_distribution<TaskId> pick(0, v - 1);
    edges.emplace_back(pick(rng), v);
  }
  for (TaskId a = 0; a < m; ++a) {
    for (TaskId b = a + 1; b < m; ++b) {
      if (u(rng) < density) edges.emplace_back(a, b);
    }
  }
  return TaskGraph::build(m, edges);
}

inline std::vector<double> random_rates(const TaskGraph& g, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> r(g.ordered_edges().size());
  for (auto& v : r) v = u(rng);
  return r;
}

}  // namespace stochalloc::testing
