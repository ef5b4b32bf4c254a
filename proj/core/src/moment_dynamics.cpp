#include "stochalloc/moment_dynamics.hpp"

#include <cmath>
#include <string>

#include "stochalloc/error.hpp"

namespace stochalloc {
namespace {

void check_dims(const GainMatrix& k, Eigen::Index n, const char* what) {
  if (k.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(k.size()) + ", got " +
                    std::to_string(n));
  }
}

}  // namespace

Eigen::VectorXd mean_rhs(const GainMatrix& k, const Eigen::VectorXd& m) {
  check_dims(k, m.size(), "mean_rhs");
  return k.matrix() * m;
}

Eigen::MatrixXd second_moment_rhs(const RateParams& p, const GainMatrix& k,
                                  const Eigen::VectorXd& m, const Eigen::MatrixXd& s) {
  check_dims(k, m.size(), "second_moment_rhs");
  check_dims(k, s.rows(), "second_moment_rhs");
  check_dims(k, s.cols(), "second_moment_rhs");
  if (static_cast<std::size_t>(k.size()) != p.task_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "second_moment_rhs: K does not match the rate model");
  }
  const Eigen::MatrixXd ks = k.matrix() * s;
  Eigen::MatrixXd out = ks + ks.transpose();

  const auto edges = p.graph().ordered_edges();
  // Ordered edges come in pairs (2k: a->b, 2k+1: b->a).
  for (std::size_t e = 0; e < edges.size(); e += 2) {
    const auto a = static_cast<Eigen::Index>(edges[e].from);
    const auto b = static_cast<Eigen::Index>(edges[e].to);
    const double source = p.rate(e) * m(a) + p.rate(e + 1) * m(b) -
                          (p.edge_coupling(e) + p.edge_coupling(e + 1)) * s(a, b);
    out(a, a) += source;
    out(b, b) += source;
    out(a, b) -= source;
    out(b, a) -= source;
  }
  return out;
}

double default_moment_timestep(const GainMatrix& k) {
  const double fastest = k.size() ? -k.matrix().diagonal().minCoeff() : 0.0;
  return fastest > 0.0 ? 1e-3 / fastest : 1e-3;
}

std::vector<MomentSample> integrate_moments(const RateParams& p, const Eigen::VectorXd& m0,
                                            double t_end, double dt, int record_every) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidTimestep, "integrate_moments: dt must be positive");
  }
  if (!(t_end >= 0.0)) {
    throw Error(ErrorCode::kValidationError, "integrate_moments: t_end must be >= 0");
  }
  if (static_cast<std::size_t>(m0.size()) != p.task_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "integrate_moments: m0 has wrong length");
  }
  record_every = std::max(record_every, 1);
  const GainMatrix k = assemble_gain_matrix(p);

  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;

  MomentState x{m0, m0 * m0.transpose()};
  std::vector<MomentSample> out;
  out.reserve(static_cast<std::size_t>(steps / record_every + 2));
  out.push_back({0.0, x});

  auto deriv = [&](const MomentState& y) {
    return MomentState{mean_rhs(k, y.mean), second_moment_rhs(p, k, y.mean, y.second)};
  };
  auto axpy = [](const MomentState& y, double a, const MomentState& d) {
    return MomentState{y.mean + a * d.mean, y.second + a * d.second};
  };

  for (long step = 1; step <= steps; ++step) {
    const MomentState k1 = deriv(x);
    const MomentState k2 = deriv(axpy(x, 0.5 * h, k1));
    const MomentState k3 = deriv(axpy(x, 0.5 * h, k2));
    const MomentState k4 = deriv(axpy(x, h, k3));
    x.mean += (h / 6.0) * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean);
    x.second += (h / 6.0) * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
    if (!x.mean.allFinite() || !x.second.allFinite()) {
      throw Error(ErrorCode::kNonFiniteState,
                  "moment ODE diverged at t=" + std::to_string(h * static_cast<double>(step)));
    }
    if (step % record_every == 0 || step == steps) {
      out.push_back({h * static_cast<double>(step), x});
    }
  }
  return out;
}

Eigen::MatrixXd steady_state_covariance(const RateParams& p, const Eigen::VectorXd& xd) {
  const auto m = static_cast<Eigen::Index>(p.task_count());
  if (xd.size() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "steady_state_covariance: xd has wrong length");
  }
  const GainMatrix k = assemble_gain_matrix(p);
  const double robots = xd.sum();

  // Unknowns: upper triangle of S, (a, b) with a <= b.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> unknowns;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) unknowns.emplace_back(a, b);
  }
  const auto n = static_cast<Eigen::Index>(unknowns.size());

  // The right-hand side is affine in S: rhs(S) = L(S) + c.
  const Eigen::MatrixXd constant = second_moment_rhs(p, k, xd, Eigen::MatrixXd::Zero(m, m));
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + m, n);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(n + m);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, m);
    const auto [a, b] = unknowns[static_cast<std::size_t>(col)];
    basis(a, b) = 1.0;
    basis(b, a) = 1.0;
    const Eigen::MatrixXd image = second_moment_rhs(p, k, xd, basis) - constant;
    for (Eigen::Index row = 0; row < n; ++row) {
      const auto [i, j] = unknowns[static_cast<std::size_t>(row)];
      system(row, col) = image(i, j);
    }
    // Conservation rows: (S 1)_i = N xd_i.
    system(n + a, col) += 1.0;
    if (a != b) system(n + b, col) += 1.0;
  }
  for (Eigen::Index row = 0; row < n; ++row) {
    const auto [i, j] = unknowns[static_cast<std::size_t>(row)];
    target(row) = -constant(i, j);
  }
  target.tail(m) = robots * xd;

  const Eigen::Index scale_rows = n + m;
  Eigen::VectorXd row_scale(scale_rows);
  for (Eigen::Index r = 0; r < scale_rows; ++r) {
    const double norm = system.row(r).lpNorm<Eigen::Infinity>();
    row_scale(r) = norm > 0.0 ? 1.0 / norm : 1.0;
  }
  system = row_scale.asDiagonal() * system;
  target = row_scale.asDiagonal() * target;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(system);
  cod.setThreshold(1e-10);
  if (cod.rank() < n) {
    throw Error(ErrorCode::kSingularSystem,
                "stationary second-moment system has rank " + std::to_string(cod.rank()) + " < " +
                    std::to_string(n) + " (disconnected support or zero rates)");
  }
  const Eigen::VectorXd solution = cod.solve(target);
  const double residual = (system * solution - target).lpNorm<Eigen::Infinity>();
  if (residual > 1e-8 * std::max(1.0, target.lpNorm<Eigen::Infinity>())) {
    throw Error(ErrorCode::kSingularSystem,
                "stationary second-moment system is inconsistent (residual " +
                    std::to_string(residual) + "); is xd stationary for K?");
  }

  Eigen::MatrixXd s(m, m);
  for (Eigen::Index col = 0; col < n; ++col) {
    const auto [a, b] = unknowns[static_cast<std::size_t>(col)];
    s(a, b) = solution(col);
    s(b, a) = solution(col);
  }
  return s - xd * xd.transpose();
}

}  // namespace stochalloc
