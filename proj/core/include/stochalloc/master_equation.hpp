#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stochalloc/moment_dynamics.hpp"
#include "stochalloc/rate_model.hpp"

namespace stochalloc {

/// Brute-force law of the folded jump process on every composition of N
/// robots into M tasks. The generator Q is stored column-wise: Q(to, from)
/// is the rate of the move from state `from` to state `to`, and every column
/// sums to zero, so dp/dt = Q p.
class MasterEquation {
 public:
  static constexpr std::size_t kDefaultStateCap = 20000;

  /// Throws kStateSpaceTooLarge when C(N+M-1, M-1) exceeds `state_cap`.
  MasterEquation(const RateParams& p, int robots, std::size_t state_cap = kDefaultStateCap);

  std::size_t state_count() const noexcept { return states_.size(); }
  int robots() const noexcept { return robots_; }
  const PopulationState& state(std::size_t index) const { return states_.at(index); }
  std::optional<std::size_t> index_of(const PopulationState& x) const;
  const Eigen::SparseMatrix<double>& generator() const noexcept { return generator_; }

  Eigen::VectorXd point_mass(const PopulationState& x) const;
  /// Null vector of Q normalised to a probability vector.
  Eigen::VectorXd stationary() const;
  /// exp(Q t) p0 by uniformisation, truncated once the Poisson tail < tol.
  Eigen::VectorXd transient(const Eigen::VectorXd& p0, double t, double tol = 1e-13) const;

  /// sum_s w_s x_s and sum_s w_s x_s x_s'. With w a distribution these are
  /// E[X] and E[XX']; with w = Q p they are the exact time derivatives.
  MomentState moments(const Eigen::VectorXd& weights) const;
  MomentState moment_derivatives(const Eigen::VectorXd& p) const;
  /// Law of X_task over 0..N.
  Eigen::VectorXd marginal(const Eigen::VectorXd& p, TaskId task) const;

 private:
  int robots_;
  std::size_t tasks_;
  std::vector<PopulationState> states_;
  std::map<std::vector<int>, std::size_t> index_;
  Eigen::SparseMatrix<double> generator_;
};

/// Number of compositions of `robots` into `tasks` parts (saturating).
std::size_t composition_count(int robots, std::size_t tasks);

MasterEquation cme_oracle(const RateParams& p, int robots,
                          std::size_t state_cap = MasterEquation::kDefaultStateCap);

}  // namespace stochalloc
