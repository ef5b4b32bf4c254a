#pragma once

#include <optional>

#include <Eigen/Dense>

namespace stochalloc::solver {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solution of min ||A x - b||_2 subject to x >= 0.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0);

/// Least-distance programming: min ||x||_2 subject to G x >= h.
/// Solved through the NNLS dual. Returns nullopt when the constraints are
/// inconsistent.
std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& g, const Eigen::VectorXd& h);

/// min ||E x - f||_2 subject to G x >= h, E of full column rank.
/// Reduced to least_distance through a QR factorisation of E.
std::optional<Eigen::VectorXd> inequality_least_squares(const Eigen::MatrixXd& e,
                                                        const Eigen::VectorXd& f,
                                                        const Eigen::MatrixXd& g,
                                                        const Eigen::VectorXd& h);

}  // namespace stochalloc::solver
