#include "stochalloc/task_graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "stochalloc/error.hpp"

namespace stochalloc {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

TaskGraph TaskGraph::build(std::size_t task_count,
                           std::span<const std::pair<TaskId, TaskId>> edges) {
  if (task_count == 0) {
    throw Error(ErrorCode::kInvalidTask, "a task graph needs at least one task");
  }
  TaskGraph g;
  for (const auto& [i, j] : edges) {
    if (i >= task_count || j >= task_count) {
      throw Error(ErrorCode::kInvalidEdge, "edge {" + std::to_string(i) + "," +
                                               std::to_string(j) + "} references a task >= " +
                                               std::to_string(task_count));
    }
    if (i == j) {
      throw Error(ErrorCode::kInvalidEdge, "self-loop on task " + std::to_string(i));
    }
    g.edges_.push_back(Edge{std::min(i, j), std::max(i, j)});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& x, const Edge& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  DisjointSets sets(task_count);
  for (const Edge& e : g.edges_) sets.unite(e.a, e.b);
  const std::size_t root = sets.find(0);
  for (TaskId t = 1; t < task_count; ++t) {
    if (sets.find(t) != root) {
      throw Error(ErrorCode::kDisconnectedGraph,
                  "task " + std::to_string(t) + " is not reachable from task 0");
    }
  }

  g.neighbors_.resize(task_count);
  g.outgoing_.resize(task_count);
  g.incoming_.resize(task_count);
  for (const Edge& e : g.edges_) {
    const std::size_t forward = g.ordered_.size();
    g.ordered_.push_back(OrderedEdge{e.a, e.b});
    g.ordered_.push_back(OrderedEdge{e.b, e.a});
    g.neighbors_[e.a].push_back(e.b);
    g.neighbors_[e.b].push_back(e.a);
    g.outgoing_[e.a].push_back(forward);
    g.incoming_[e.b].push_back(forward);
    g.outgoing_[e.b].push_back(forward + 1);
    g.incoming_[e.a].push_back(forward + 1);
  }
  for (auto& n : g.neighbors_) std::sort(n.begin(), n.end());
  return g;
}

void TaskGraph::check_task(TaskId i) const {
  if (i >= neighbors_.size()) {
    throw Error(ErrorCode::kInvalidTask, "task " + std::to_string(i) + " out of range [0, " +
                                             std::to_string(neighbors_.size()) + ")");
  }
}

std::span<const TaskId> TaskGraph::neighbors(TaskId i) const {
  check_task(i);
  return neighbors_[i];
}

std::size_t TaskGraph::max_degree() const noexcept {
  std::size_t d = 0;
  for (const auto& n : neighbors_) d = std::max(d, n.size());
  return d;
}

bool TaskGraph::adjacent(TaskId i, TaskId j) const {
  check_task(i);
  check_task(j);
  return std::binary_search(neighbors_[i].begin(), neighbors_[i].end(), j);
}

std::optional<std::size_t> TaskGraph::ordered_index(TaskId from, TaskId to) const {
  check_task(from);
  check_task(to);
  for (std::size_t e : outgoing_[from]) {
    if (ordered_[e].to == to) return e;
  }
  return std::nullopt;
}

std::span<const std::size_t> TaskGraph::outgoing(TaskId i) const {
  check_task(i);
  return outgoing_[i];
}

std::span<const std::size_t> TaskGraph::incoming(TaskId i) const {
  check_task(i);
  return incoming_[i];
}

TaskGraph cycle_graph(std::size_t task_count) {
  std::vector<std::pair<TaskId, TaskId>> edges;
  if (task_count == 2) edges.emplace_back(0, 1);
  if (task_count > 2) {
    for (TaskId i = 0; i < task_count; ++i) edges.emplace_back(i, (i + 1) % task_count);
  }
  return TaskGraph::build(task_count, edges);
}

TaskGraph path_graph(std::size_t task_count) {
  std::vector<std::pair<TaskId, TaskId>> edges;
  for (TaskId i = 0; i + 1 < task_count; ++i) edges.emplace_back(i, i + 1);
  return TaskGraph::build(task_count, edges);
}

TaskGraph complete_graph(std::size_t task_count) {
  std::vector<std::pair<TaskId, TaskId>> edges;
  for (TaskId i = 0; i < task_count; ++i) {
    for (TaskId j = i + 1; j < task_count; ++j) edges.emplace_back(i, j);
  }
  return TaskGraph::build(task_count, edges);
}

}  // namespace stochalloc
