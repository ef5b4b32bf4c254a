#include "stochalloc/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stochalloc/error.hpp"

namespace stochalloc::solver {
namespace {

// Unconstrained least squares restricted to the passive columns.
Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  if (cols.empty()) return Eigen::VectorXd::Zero(a.cols());
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
  const Eigen::VectorXd zp = sub.colPivHouseholderQr().solve(b);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zp(static_cast<Eigen::Index>(k));
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations) {
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "nnls: A and b disagree in row count");
  }
  const Eigen::Index n = a.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);

  NnlsResult result;
  result.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, a.lpNorm<Eigen::Infinity>()) *
                     std::max(1.0, b.lpNorm<Eigen::Infinity>()) * static_cast<double>(std::max<Eigen::Index>(n, a.rows()));

  Eigen::VectorXd& x = result.x;
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  for (; result.iterations < max_iterations; ++result.iterations) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) {
      result.converged = true;
      break;
    }
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner <= n; ++inner) {
      Eigen::VectorXd z = solve_passive(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      // Step from x toward z until the first passive variable hits zero.
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    w = a.transpose() * (b - a * x);
  }
  result.residual_norm = (a * x - b).norm();
  return result;
}

std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& g, const Eigen::VectorXd& h) {
  if (g.rows() != h.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "least_distance: G and h disagree in row count");
  }
  const Eigen::Index n = g.cols();
  const Eigen::Index m = g.rows();
  if (m == 0) return Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd e(n + 1, m);
  e.topRows(n) = g.transpose();
  e.row(n) = h.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
  f(n) = 1.0;

  const NnlsResult dual = nnls(e, f);
  const Eigen::VectorXd r = e * dual.x - f;
  // r(n) = h'u - 1; a vanishing residual certifies G x >= h is empty.
  const double scale = 1.0 + h.lpNorm<Eigen::Infinity>();
  if (r.norm() <= 1e-12 * scale || std::abs(r(n)) <= 1e-14) return std::nullopt;
  Eigen::VectorXd x = -r.head(n) / r(n);

  const double slack = (g * x - h).minCoeff();
  if (slack < -1e-8 * scale) return std::nullopt;
  return x;
}

std::optional<Eigen::VectorXd> inequality_least_squares(const Eigen::MatrixXd& e,
                                                        const Eigen::VectorXd& f,
                                                        const Eigen::MatrixXd& g,
                                                        const Eigen::VectorXd& h) {
  if (e.rows() != f.size() || g.cols() != e.cols() || g.rows() != h.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "inequality_least_squares: inconsistent shapes");
  }
  const Eigen::Index n = e.cols();
  if (e.rows() < n) {
    throw Error(ErrorCode::kSingularSystem, "inequality_least_squares: E must have full column rank");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(e);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const Eigen::VectorXd f1 = (qr.householderQ().transpose() * f).head(n);
  // x = R^{-1}(y + f1); G x >= h  <=>  (G R^{-1}) y >= h - G R^{-1} f1.
  const Eigen::MatrixXd g_rinv =
      r.transpose().triangularView<Eigen::Lower>().solve(g.transpose()).transpose();
  const auto y = least_distance(g_rinv, h - g_rinv * f1);
  if (!y) return std::nullopt;
  return Eigen::VectorXd(r.triangularView<Eigen::Upper>().solve(*y + f1));
}

}  // namespace stochalloc::solver
