#include "stochalloc/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseLU>

#include "stochalloc/error.hpp"

namespace stochalloc {
namespace {

void enumerate(std::vector<int>& prefix, std::size_t tasks, int remaining,
               std::vector<PopulationState>& out) {
  if (prefix.size() + 1 == tasks) {
    prefix.push_back(remaining);
    out.push_back(PopulationState{prefix});
    prefix.pop_back();
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    prefix.push_back(k);
    enumerate(prefix, tasks, remaining - k, out);
    prefix.pop_back();
  }
}

}  // namespace

std::size_t composition_count(int robots, std::size_t tasks) {
  // C(robots + tasks - 1, tasks - 1), saturating at SIZE_MAX.
  const std::size_t k = tasks - 1;
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(static_cast<std::size_t>(robots) + i) / static_cast<long double>(i);
  }
  if (c > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(std::llround(c));
}

MasterEquation::MasterEquation(const RateParams& p, int robots, std::size_t state_cap)
    : robots_(robots), tasks_(p.task_count()) {
  if (robots < 0) throw Error(ErrorCode::kValidationError, "robot count must be >= 0");
  const std::size_t count = composition_count(robots, tasks_);
  if (count > state_cap) {
    throw Error(ErrorCode::kStateSpaceTooLarge, std::to_string(count) + " states exceed the cap of " +
                                                    std::to_string(state_cap));
  }
  states_.reserve(count);
  std::vector<int> prefix;
  enumerate(prefix, tasks_, robots, states_);
  for (std::size_t s = 0; s < states_.size(); ++s) index_.emplace(states_[s].counts, s);

  const auto edges = p.graph().ordered_edges();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(states_.size() * (edges.size() + 1));
  std::vector<int> next;
  for (std::size_t s = 0; s < states_.size(); ++s) {
    const auto& x = states_[s].counts;
    double out_rate = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double a = folded_propensity(p, x, e);
      if (a <= 0.0) continue;
      next = x;
      --next[edges[e].from];
      ++next[edges[e].to];
      triplets.emplace_back(static_cast<int>(index_.at(next)), static_cast<int>(s), a);
      out_rate += a;
    }
    triplets.emplace_back(static_cast<int>(s), static_cast<int>(s), -out_rate);
  }
  const auto n = static_cast<Eigen::Index>(states_.size());
  generator_.resize(n, n);
  generator_.setFromTriplets(triplets.begin(), triplets.end());
  generator_.makeCompressed();
}

std::optional<std::size_t> MasterEquation::index_of(const PopulationState& x) const {
  const auto it = index_.find(x.counts);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd MasterEquation::point_mass(const PopulationState& x) const {
  const auto idx = index_of(x);
  if (!idx) throw Error(ErrorCode::kInvalidInitialState, "state is not in the enumerated space");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(states_.size()));
  p(static_cast<Eigen::Index>(*idx)) = 1.0;
  return p;
}

namespace {

// Strongly connected components of the jump graph (edge from -> to for
// every positive rate), iterative Tarjan. Returns the component of each
// state and the number of components.
std::pair<std::vector<int>, int> strong_components(const Eigen::SparseMatrix<double>& q) {
  const auto n = static_cast<int>(q.cols());
  std::vector<int> comp(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n)),
      order(static_cast<std::size_t>(n), -1), stack;
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  int counter = 0;
  int components = 0;
  struct Frame {
    int v;
    Eigen::SparseMatrix<double>::InnerIterator it;
  };
  for (int root = 0; root < n; ++root) {
    if (order[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Frame> frames;
    auto enter = [&](int v) {
      order[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
      stack.push_back(v);
      on_stack[static_cast<std::size_t>(v)] = true;
      frames.push_back({v, Eigen::SparseMatrix<double>::InnerIterator(q, v)});
    };
    enter(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto v = static_cast<std::size_t>(f.v);
      if (f.it) {
        const auto w = static_cast<int>(f.it.row());
        const bool jump = w != f.v && f.it.value() > 0.0;
        ++f.it;
        if (!jump) continue;
        if (order[static_cast<std::size_t>(w)] < 0) {
          enter(w);
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[v] = std::min(low[v], order[static_cast<std::size_t>(w)]);
        }
        continue;
      }
      if (low[v] == order[v]) {
        int w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp[static_cast<std::size_t>(w)] = components;
        } while (w != f.v);
        ++components;
      }
      const int child_low = low[v];
      frames.pop_back();
      if (!frames.empty()) {
        const auto parent = static_cast<std::size_t>(frames.back().v);
        low[parent] = std::min(low[parent], child_low);
      }
    }
  }
  return {comp, components};
}

}  // namespace

Eigen::VectorXd MasterEquation::stationary() const {
  const auto n = static_cast<Eigen::Index>(states_.size());
  if (n == 1) return Eigen::VectorXd::Ones(1);

  // The stationary law lives on the closed communicating classes; it is
  // unique exactly when there is one.
  const auto [comp, components] = strong_components(generator_);
  std::vector<bool> closed(static_cast<std::size_t>(components), true);
  for (Eigen::Index col = 0; col < generator_.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(generator_, col); it; ++it) {
      const int from = comp[static_cast<std::size_t>(col)];
      if (it.value() > 0.0 && it.row() != col && comp[static_cast<std::size_t>(it.row())] != from) {
        closed[static_cast<std::size_t>(from)] = false;
      }
    }
  }
  const auto closed_count = std::count(closed.begin(), closed.end(), true);
  if (closed_count != 1) {
    throw Error(ErrorCode::kSingularSystem, "generator has " + std::to_string(closed_count) +
                                                " closed classes; no unique stationary distribution");
  }
  const int target = static_cast<int>(std::find(closed.begin(), closed.end(), true) - closed.begin());

  std::vector<Eigen::Index> members;
  std::vector<Eigen::Index> local(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (comp[static_cast<std::size_t>(i)] == target) {
      local[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(members.size());
      members.push_back(i);
    }
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  const auto k = static_cast<Eigen::Index>(members.size());
  if (k == 1) {
    p(members.front()) = 1.0;
    return p;
  }

  // Restricted generator with the balance equation of the first member
  // dropped and its probability fixed to 1; nonsingular on a closed class.
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k - 1);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(generator_, members[static_cast<std::size_t>(c)]); it; ++it) {
      const Eigen::Index r = local[static_cast<std::size_t>(it.row())];
      if (r <= 0) continue;
      if (c == 0) {
        rhs(r - 1) -= it.value();
      } else {
        triplets.emplace_back(static_cast<int>(r - 1), static_cast<int>(c - 1), it.value());
      }
    }
  }
  Eigen::SparseMatrix<double> a(k - 1, k - 1);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem, "stationary factorisation failed");
  }
  const Eigen::VectorXd rest = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !rest.allFinite()) {
    throw Error(ErrorCode::kSingularSystem, "stationary solve failed");
  }
  p(members.front()) = 1.0;
  for (Eigen::Index c = 1; c < k; ++c) p(members[static_cast<std::size_t>(c)]) = std::max(rest(c - 1), 0.0);
  return p / p.sum();
}

Eigen::VectorXd MasterEquation::transient(const Eigen::VectorXd& p0, double t, double tol) const {
  if (p0.size() != static_cast<Eigen::Index>(states_.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "transient: p0 has wrong length");
  }
  if (t < 0.0) throw Error(ErrorCode::kOutOfRange, "transient: t must be >= 0");
  double lambda = 0.0;
  for (Eigen::Index i = 0; i < generator_.rows(); ++i) {
    lambda = std::max(lambda, -generator_.coeff(i, i));
  }
  if (lambda == 0.0 || t == 0.0) return p0;
  lambda *= 1.02;
  const double lt = lambda * t;

  // p(t) = sum_k Pois(k; lt) (I + Q/lambda)^k p0 with log-space weights.
  Eigen::VectorXd term = p0;
  Eigen::VectorXd result = Eigen::VectorXd::Zero(p0.size());
  double accumulated = 0.0;
  for (long k = 0;; ++k) {
    const double weight =
        std::exp(-lt + static_cast<double>(k) * std::log(lt) - std::lgamma(static_cast<double>(k) + 1.0));
    result += weight * term;
    accumulated += weight;
    if (static_cast<double>(k) > lt && 1.0 - accumulated < tol) break;
    if (k > static_cast<long>(lt + 50.0 * std::sqrt(lt) + 1000.0)) break;
    term += (generator_ * term) / lambda;
  }
  return result;
}

MomentState MasterEquation::moments(const Eigen::VectorXd& weights) const {
  const auto m = static_cast<Eigen::Index>(tasks_);
  MomentState out{Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m)};
  for (std::size_t s = 0; s < states_.size(); ++s) {
    const double w = weights(static_cast<Eigen::Index>(s));
    if (w == 0.0) continue;
    const Eigen::VectorXd x = states_[s].as_vector();
    out.mean += w * x;
    out.second += w * (x * x.transpose());
  }
  return out;
}

MomentState MasterEquation::moment_derivatives(const Eigen::VectorXd& p) const {
  return moments(generator_ * p);
}

Eigen::VectorXd MasterEquation::marginal(const Eigen::VectorXd& p, TaskId task) const {
  if (task >= tasks_) throw Error(ErrorCode::kInvalidTask, "marginal: task out of range");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(robots_ + 1);
  for (std::size_t s = 0; s < states_.size(); ++s) {
    out(states_[s].counts[task]) += p(static_cast<Eigen::Index>(s));
  }
  return out;
}

MasterEquation cme_oracle(const RateParams& p, int robots, std::size_t state_cap) {
  return MasterEquation(p, robots, state_cap);
}

}  // namespace stochalloc
