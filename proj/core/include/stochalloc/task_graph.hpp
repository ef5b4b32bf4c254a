#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace stochalloc {

/// Tasks are 0-indexed inside the library. Configuration files, CSV output
/// and the CLI use 1-indexed task numbers; conversion happens at that boundary.
using TaskId = std::size_t;

struct Edge {
  TaskId a;  // a < b
  TaskId b;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct OrderedEdge {
  TaskId from;
  TaskId to;
  friend bool operator==(const OrderedEdge&, const OrderedEdge&) = default;
};

/// Connected undirected task topology. Immutable after construction.
///
/// Every undirected edge k = {a, b} (a < b) owns two ordered edges:
/// index 2k is a->b and index 2k+1 is b->a, so reverse(e) == e ^ 1.
class TaskGraph {
 public:
  /// Validates and builds a graph. Pairs are unordered and 0-indexed;
  /// duplicates collapse silently. Throws kInvalidTask for task_count == 0,
  /// kInvalidEdge for out-of-range endpoints or self-loops and
  /// kDisconnectedGraph when some task is unreachable from task 0.
  static TaskGraph build(std::size_t task_count,
                         std::span<const std::pair<TaskId, TaskId>> edges);

  std::size_t task_count() const noexcept { return neighbors_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const OrderedEdge> ordered_edges() const noexcept { return ordered_; }

  /// Sorted neighbour set of task i. Throws kInvalidTask.
  std::span<const TaskId> neighbors(TaskId i) const;
  std::size_t degree(TaskId i) const { return neighbors(i).size(); }
  std::size_t max_degree() const noexcept;
  bool adjacent(TaskId i, TaskId j) const;

  /// Ordered-edge index of i->j, or nullopt when {i, j} is not an edge.
  std::optional<std::size_t> ordered_index(TaskId from, TaskId to) const;
  static constexpr std::size_t reverse(std::size_t e) noexcept { return e ^ 1U; }

  /// Ordered edges leaving / entering task i.
  std::span<const std::size_t> outgoing(TaskId i) const;
  std::span<const std::size_t> incoming(TaskId i) const;

  friend bool operator==(const TaskGraph& x, const TaskGraph& y) {
    return x.edges_ == y.edges_ && x.neighbors_.size() == y.neighbors_.size();
  }

 private:
  TaskGraph() = default;
  void check_task(TaskId i) const;

  std::vector<Edge> edges_;
  std::vector<OrderedEdge> ordered_;
  std::vector<std::vector<TaskId>> neighbors_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<std::vector<std::size_t>> incoming_;
};

TaskGraph cycle_graph(std::size_t task_count);
TaskGraph path_graph(std::size_t task_count);
TaskGraph complete_graph(std::size_t task_count);

}  // namespace stochalloc
