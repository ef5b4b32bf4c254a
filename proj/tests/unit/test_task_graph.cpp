#include <doctest.h>

#include <algorithm>
#include <random>

#include "stochalloc/error.hpp"
#include "stochalloc/task_graph.hpp"
#include "support.hpp"

using namespace stochalloc;
using stochalloc::testing::graph1;

namespace {

std::vector<TaskId> nbrs(const TaskGraph& g, TaskId i) {
  auto s = g.neighbors(i);
  return {s.begin(), s.end()};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kValidationError;
}

}  // namespace

TEST_CASE("four-cycle") {
  const TaskGraph g = graph1(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}});
  CHECK(g.task_count() == 4);
  CHECK(g.edges().size() == 4);
  CHECK(g.ordered_edges().size() == 8);
  CHECK(nbrs(g, 0) == std::vector<TaskId>{1, 3});
  CHECK(g.max_degree() == 2);
}

TEST_CASE("two tasks and complete graph neighbours") {
  const TaskGraph two = graph1(2, {{1, 2}});
  CHECK(nbrs(two, 1) == std::vector<TaskId>{0});
  CHECK(nbrs(complete_graph(3), 1) == std::vector<TaskId>{0, 2});
}

TEST_CASE("invalid graphs") {
  CHECK(code_of([] { graph1(4, {{1, 2}, {3, 4}}); }) == ErrorCode::kDisconnectedGraph);
  CHECK(code_of([] { graph1(3, {{1, 1}, {2, 3}}); }) == ErrorCode::kInvalidEdge);
  CHECK(code_of([] { graph1(3, {{1, 4}, {2, 3}}); }) == ErrorCode::kInvalidEdge);
  CHECK(code_of([] { graph1(4, {{1, 2}, {2, 3}, {3, 4}}).neighbors(4); }) == ErrorCode::kInvalidTask);
}

TEST_CASE("duplicates collapse") {
  const TaskGraph g = graph1(3, {{1, 2}, {2, 1}, {1, 2}, {2, 3}});
  CHECK(g.edges().size() == 2);
}

TEST_CASE("single task needs no edges") {
  const TaskGraph g = TaskGraph::build(1, {});
  CHECK(g.task_count() == 1);
  CHECK(g.neighbors(0).empty());
}

TEST_CASE("ordered edges pair with their reverse") {
  const TaskGraph g = complete_graph(4);
  const auto ordered = g.ordered_edges();
  for (std::size_t e = 0; e < ordered.size(); ++e) {
    const auto rev = ordered[TaskGraph::reverse(e)];
    CHECK(rev.from == ordered[e].to);
    CHECK(rev.to == ordered[e].from);
    CHECK(g.ordered_index(ordered[e].from, ordered[e].to) == e);
  }
  CHECK_FALSE(path_graph(3).ordered_index(0, 2).has_value());
}

TEST_CASE("neighbour relation is symmetric on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 7;
    const TaskGraph g = testing::random_connected_graph(m, 0.3, rng);
    for (TaskId i = 0; i < m; ++i) {
      for (TaskId j : g.neighbors(i)) {
        const auto back = g.neighbors(j);
        CHECK(std::find(back.begin(), back.end(), i) != back.end());
        CHECK(g.adjacent(j, i));
      }
      for (std::size_t e : g.outgoing(i)) CHECK(g.ordered_edges()[e].from == i);
      for (std::size_t e : g.incoming(i)) CHECK(g.ordered_edges()[e].to == i);
    }
  }
}
