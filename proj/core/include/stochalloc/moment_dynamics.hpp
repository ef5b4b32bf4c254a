#pragma once

#include <vector>

#include <Eigen/Dense>

#include "stochalloc/gain_design.hpp"
#include "stochalloc/rate_model.hpp"

namespace stochalloc {

/// First moment m = E[X] and second moment S = E[XX'].
struct MomentState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd second;

  Eigen::MatrixXd covariance() const { return second - mean * mean.transpose(); }
};

struct MomentSample {
  double t = 0.0;
  MomentState state;
};

/// dE[X]/dt = K E[X]. Takes only K: the mean never sees beta.
Eigen::VectorXd mean_rhs(const GainMatrix& k, const Eigen::VectorXd& m);

/// dE[XX']/dt = KS + SK' + sum over edges {i,j} of
///   (e_i - e_j)(e_i - e_j)' (r_ij m_i + r_ji m_j - 2 b_ij S_ij).
/// Its diagonal is the per-task source term; the off-diagonal part accounts
/// for the fact that one move changes two counts at once. Exact for
/// symmetric coupling whenever no propensity is folded.
Eigen::MatrixXd second_moment_rhs(const RateParams& p, const GainMatrix& k,
                                  const Eigen::VectorXd& m, const Eigen::MatrixXd& s);

/// 1e-3 / |most negative diagonal entry of K| (1e-3 when K is zero).
double default_moment_timestep(const GainMatrix& k);

/// Fixed-step RK4 on (m, S) from deterministic counts m0 (S0 = m0 m0').
/// Samples are kept every `record_every` steps plus the final step.
/// Throws kInvalidTimestep for dt <= 0 and kNonFiniteState on blow-up.
std::vector<MomentSample> integrate_moments(const RateParams& p, const Eigen::VectorXd& m0,
                                            double t_end, double dt, int record_every = 1);

/// Stationary covariance C = S - xd xd' where S solves second_moment_rhs = 0
/// at m = xd together with S 1 = N xd and symmetry. Throws kSingularSystem
/// when the augmented system does not pin S down or is inconsistent.
Eigen::MatrixXd steady_state_covariance(const RateParams& p, const Eigen::VectorXd& xd);

}  // namespace stochalloc
