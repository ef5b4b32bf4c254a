#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "stochalloc/rate_model.hpp"
#include "stochalloc/task_graph.hpp"

namespace stochalloc {

/// M x M gain matrix of the mean dynamics: K(i,j) = r(j->i) for i != j and
/// K(j,j) = -sum_i r(j->i). Columns sum to zero.
class GainMatrix {
 public:
  explicit GainMatrix(Eigen::MatrixXd k) : k_(std::move(k)) {}

  const Eigen::MatrixXd& matrix() const noexcept { return k_; }
  Eigen::Index size() const noexcept { return k_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return k_(i, j); }

 private:
  Eigen::MatrixXd k_;
};

GainMatrix assemble_gain_matrix(const RateParams& p);

struct StationarityCheck {
  bool ok = false;           // ||K xd||_inf <= tol
  bool spectrum_ok = false;  // one eigenvalue at zero, the rest strictly stable
  Eigen::VectorXd residual;
  double residual_inf = 0.0;
  Eigen::VectorXcd eigenvalues;
};

StationarityCheck verify_stationarity(const GainMatrix& k, const Eigen::VectorXd& xd, double tol);

/// Feasible set of the rate design. |K(j,j)| >= diag_min bounds convergence
/// speed from below; every rate stays <= r_max. `rate_floor` (per ordered
/// edge, empty = all zero) raises the lower bound of individual rates.
struct DesignConstraints {
  double diag_min = 1.5;
  double r_max = std::numeric_limits<double>::infinity();
  double residual_tol = 1e-8;
  std::vector<double> rate_floor;
};

struct RateDesign {
  RateParams params;
  Eigen::VectorXd residual;  // K xd
  double residual_inf = 0.0;
  bool exact = false;        // residual_inf <= residual_tol
};

/// Rates r >= 0 on the graph's ordered edges minimising ||K xd||_2 under the
/// constraints. Among minimisers the total switching activity sum(r) is
/// minimised, then ||r||_2, which makes the answer unique. beta is zero.
/// Throws kInfeasible if some task cannot reach diag_min below r_max.
RateDesign design_rates(const TaskGraph& graph, const Eigen::VectorXd& xd,
                        const DesignConstraints& constraints);

/// Per-edge floor b(i,j) xd_j: rates at or above it keep every raw
/// propensity nonnegative at xd for the given beta, so nothing is folded
/// there.
std::vector<double> positivity_floor(const TaskGraph& graph, const Eigen::VectorXd& xd,
                                     const Eigen::VectorXd& beta, BetaCoupling coupling);

/// Maps a beta vector to per-task steady-state variances.
using VarianceEvaluator = std::function<Eigen::VectorXd(const Eigen::VectorXd& beta)>;

struct BetaTuningOptions {
  int max_iters = 200;
  double step = 0.01;
  /// Largest relative increase of any other task's variance tolerated when
  /// accepting a step.
  double disturbance_tolerance = 0.02;
};

/// Coordinate-wise greedy increase of beta from zero. A step on beta_i is
/// kept only if task i's variance strictly drops, no other variance rises by
/// more than the tolerance and the steady-state raw propensities stay positive.
Eigen::VectorXd greedy_beta_tuning(const RateParams& p, const Eigen::VectorXd& xd,
                                   const VarianceEvaluator& evaluator,
                                   const BetaTuningOptions& options = {});

/// Evaluator backed by the closed-form stationary covariance solve.
VarianceEvaluator covariance_evaluator(RateParams p, Eigen::VectorXd xd);

}  // namespace stochalloc
