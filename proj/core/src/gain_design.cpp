#include "stochalloc/gain_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stochalloc/error.hpp"
#include "stochalloc/moment_dynamics.hpp"
#include "stochalloc/nnls.hpp"

namespace stochalloc {

GainMatrix assemble_gain_matrix(const RateParams& p) {
  const auto m = static_cast<Eigen::Index>(p.task_count());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  const auto edges = p.graph().ordered_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto from = static_cast<Eigen::Index>(edges[e].from);
    const auto to = static_cast<Eigen::Index>(edges[e].to);
    k(to, from) += p.rate(e);
  }
  // Diagonal as the negative off-diagonal column sum keeps 1'K = 0 exact.
  for (Eigen::Index j = 0; j < m; ++j) {
    double column = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != j) column += k(i, j);
    }
    k(j, j) = -column;
  }
  return GainMatrix(std::move(k));
}

StationarityCheck verify_stationarity(const GainMatrix& k, const Eigen::VectorXd& xd, double tol) {
  if (xd.size() != k.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "verify_stationarity: xd has " +
                                                   std::to_string(xd.size()) + " entries for a " +
                                                   std::to_string(k.size()) + "x" +
                                                   std::to_string(k.size()) + " gain matrix");
  }
  StationarityCheck check;
  check.residual = k.matrix() * xd;
  check.residual_inf = check.residual.size() ? check.residual.lpNorm<Eigen::Infinity>() : 0.0;
  check.ok = check.residual_inf <= tol;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(k.matrix(), /*computeEigenvectors=*/false);
  check.eigenvalues = solver.eigenvalues();
  int zero = 0;
  int stable = 0;
  for (Eigen::Index i = 0; i < check.eigenvalues.size(); ++i) {
    const double re = check.eigenvalues(i).real();
    if (std::abs(re) <= 1e-9) {
      ++zero;
    } else if (re < 0.0) {
      ++stable;
    }
  }
  check.spectrum_ok = zero == 1 && stable == check.eigenvalues.size() - 1;
  return check;
}

namespace {

struct DesignProblem {
  Eigen::MatrixXd flow;         // M x E, flow * r = K(r) xd
  Eigen::MatrixXd constraints;  // G r >= h
  Eigen::VectorXd bounds;
};

DesignProblem build_problem(const TaskGraph& graph, const Eigen::VectorXd& xd,
                            const DesignConstraints& c) {
  const auto m = static_cast<Eigen::Index>(graph.task_count());
  const auto edges = graph.ordered_edges();
  const auto n = static_cast<Eigen::Index>(edges.size());
  const bool capped = std::isfinite(c.r_max);

  DesignProblem prob;
  prob.flow = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index e = 0; e < n; ++e) {
    const auto from = static_cast<Eigen::Index>(edges[static_cast<std::size_t>(e)].from);
    const auto to = static_cast<Eigen::Index>(edges[static_cast<std::size_t>(e)].to);
    prob.flow(to, e) += xd(from);
    prob.flow(from, e) -= xd(from);
  }

  const Eigen::Index rows = n + (capped ? n : 0) + m;
  prob.constraints = Eigen::MatrixXd::Zero(rows, n);
  prob.bounds = Eigen::VectorXd::Zero(rows);
  Eigen::Index row = 0;
  for (Eigen::Index e = 0; e < n; ++e, ++row) {
    prob.constraints(row, e) = 1.0;
    if (!c.rate_floor.empty()) prob.bounds(row) = c.rate_floor[static_cast<std::size_t>(e)];
  }
  if (capped) {
    for (Eigen::Index e = 0; e < n; ++e, ++row) {
      prob.constraints(row, e) = -1.0;
      prob.bounds(row) = -c.r_max;
    }
  }
  for (Eigen::Index t = 0; t < m; ++t, ++row) {
    for (std::size_t e : graph.outgoing(static_cast<TaskId>(t))) {
      prob.constraints(row, static_cast<Eigen::Index>(e)) = 1.0;
    }
    prob.bounds(row) = c.diag_min;
  }
  return prob;
}

// Min-norm point of {flow r = 0, G_A r = h_A} where A holds the constraints
// active at `guess`. At the lexicographic optimum the cost vector lies in
// the span of the active normals, so this reproduces the optimum exactly
// and without the cancellation the mu shift introduces.
std::optional<Eigen::VectorXd> polish(const DesignProblem& prob, const Eigen::VectorXd& guess) {
  const double scale = std::max(1.0, guess.lpNorm<Eigen::Infinity>());
  const Eigen::VectorXd slack = prob.constraints * guess - prob.bounds;
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < slack.size(); ++i) {
    if (slack(i) <= 1e-6 * scale) active.push_back(i);
  }
  const Eigen::Index m = prob.flow.rows();
  const Eigen::Index n = prob.flow.cols();
  Eigen::MatrixXd a(m + static_cast<Eigen::Index>(active.size()), n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
  a.topRows(m) = prob.flow;
  for (std::size_t k = 0; k < active.size(); ++k) {
    a.row(m + static_cast<Eigen::Index>(k)) = prob.constraints.row(active[k]);
    b(m + static_cast<Eigen::Index>(k)) = prob.bounds(active[k]);
  }
  const Eigen::VectorXd r = a.completeOrthogonalDecomposition().solve(b);
  if ((a * r - b).lpNorm<Eigen::Infinity>() > 1e-10 * scale) return std::nullopt;
  if ((prob.constraints * r - prob.bounds).minCoeff() < -1e-10 * scale) return std::nullopt;
  if (r.sum() > guess.sum() + 1e-8 * scale) return std::nullopt;
  return r;
}

// Zero-residual designs: r = Z y spans the null space of the flow matrix.
// min sum(r) then min ||r|| is the least-distance problem min ||r + mu 1||
// for every mu beyond a finite threshold. Each iterate is polished on its
// active set; two equal polished points in a row end the search.
std::optional<Eigen::VectorXd> exact_design(const DesignProblem& prob) {
  const Eigen::Index n = prob.flow.cols();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(prob.flow, Eigen::ComputeFullV);
  const double sigma_max = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  const double threshold = 1e-12 * std::max(1.0, sigma_max) * static_cast<double>(n);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > threshold) ++rank;
  }
  const Eigen::MatrixXd basis = svd.matrixV().rightCols(n - rank);
  if (basis.cols() == 0) return std::nullopt;

  const Eigen::MatrixXd g_basis = prob.constraints * basis;
  const Eigen::VectorXd ones_proj = basis.transpose() * Eigen::VectorXd::Ones(n);

  std::optional<Eigen::VectorXd> previous;
  std::optional<Eigen::VectorXd> fallback;
  for (double mu = 1.0; mu <= 1e8; mu *= 10.0) {
    const auto w = solver::least_distance(g_basis, prob.bounds + mu * (g_basis * ones_proj));
    if (!w) break;  // large mu can lose the LDP to round-off
    const Eigen::VectorXd raw = basis * (*w - mu * ones_proj);
    if (!fallback) fallback = raw;
    auto r = polish(prob, raw);
    if (!r) continue;
    if (previous && (*r - *previous).lpNorm<Eigen::Infinity>() <=
                        1e-12 * std::max(1.0, r->lpNorm<Eigen::Infinity>())) {
      return r;
    }
    previous = std::move(r);
  }
  if (previous) return previous;
  return fallback;
}

// Strictly positive residual: regularised LSI for min ||flow r||_2. A tiny
// ridge makes the reduced LDP too ill-conditioned to certify, so the ridge
// grows until the solve succeeds.
std::optional<Eigen::VectorXd> residual_design(const DesignProblem& prob) {
  const Eigen::Index n = prob.flow.cols();
  const Eigen::Index m = prob.flow.rows();
  Eigen::MatrixXd stacked(m + n, n);
  stacked.topRows(m) = prob.flow;
  for (double ridge = 1e-7; ridge <= 1e-3; ridge *= 10.0) {
    stacked.bottomRows(n) = ridge * std::max(1.0, prob.flow.norm()) * Eigen::MatrixXd::Identity(n, n);
    auto r = solver::inequality_least_squares(stacked, Eigen::VectorXd::Zero(m + n), prob.constraints,
                                              prob.bounds);
    if (r) return r;
  }
  return std::nullopt;
}

// The LDP meets G r >= h only up to round-off; a uniform scale (which keeps
// K xd = 0) restores the diagonal bound exactly.
void enforce_floor(const TaskGraph& graph, const DesignConstraints& c, std::vector<double>& r) {
  double worst = 1.0;
  for (TaskId t = 0; t < graph.task_count(); ++t) {
    double out = 0.0;
    for (std::size_t e : graph.outgoing(t)) out += r[e];
    if (out > 0.0) worst = std::max(worst, c.diag_min / out);
  }
  if (worst > 1.0 && worst <= 1.0 + 1e-6) {
    for (auto& v : r) v *= worst;
  }
  for (auto& v : r) v = std::min(v, c.r_max);
}

}  // namespace

RateDesign design_rates(const TaskGraph& graph, const Eigen::VectorXd& xd,
                        const DesignConstraints& c) {
  const std::size_t m = graph.task_count();
  if (static_cast<std::size_t>(xd.size()) != m) {
    throw Error(ErrorCode::kDimensionMismatch, "design_rates: xd length differs from task count");
  }
  for (Eigen::Index i = 0; i < xd.size(); ++i) {
    if (!(xd(i) >= 0.0) || !std::isfinite(xd(i))) {
      throw Error(ErrorCode::kInvalidDistribution, "design_rates: xd must be finite and >= 0");
    }
  }
  if (!(c.diag_min > 0.0)) {
    throw Error(ErrorCode::kValidationError, "design_rates: diag_min must be positive");
  }
  if (!(c.r_max > 0.0)) {
    throw Error(ErrorCode::kValidationError, "design_rates: r_max must be positive");
  }
  for (TaskId t = 0; t < m; ++t) {
    if (static_cast<double>(graph.degree(t)) * c.r_max < c.diag_min) {
      throw Error(ErrorCode::kInfeasible, "task " + std::to_string(t) + " has degree " +
                                              std::to_string(graph.degree(t)) +
                                              "; diag_min exceeds degree * r_max");
    }
  }

  if (!c.rate_floor.empty()) {
    if (c.rate_floor.size() != graph.ordered_edges().size()) {
      throw Error(ErrorCode::kDimensionMismatch, "design_rates: rate_floor needs one entry per ordered edge");
    }
    for (double f : c.rate_floor) {
      if (!(f >= 0.0) || f > c.r_max) {
        throw Error(ErrorCode::kInfeasible, "design_rates: rate floor outside [0, r_max]");
      }
    }
  }

  const DesignProblem prob = build_problem(graph, xd, c);
  auto rates = exact_design(prob);
  if (!rates) rates = residual_design(prob);
  if (!rates) {
    throw Error(ErrorCode::kInfeasible, "design_rates: constraint set is empty");
  }
  // Round-off sized rates would connect states the design meant to keep
  // apart (an edge that should carry nothing), so they become exact zeros.
  const double chop = 1e-12 * std::max(rates->cwiseAbs().maxCoeff(), 1.0);
  std::vector<double> r(static_cast<std::size_t>(rates->size()));
  for (Eigen::Index e = 0; e < rates->size(); ++e) {
    const double v = (*rates)(e);
    r[static_cast<std::size_t>(e)] = v > chop ? v : 0.0;
  }
  enforce_floor(graph, c, r);

  RateParams params(graph, std::move(r), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
  const GainMatrix k = assemble_gain_matrix(params);
  Eigen::VectorXd residual = k.matrix() * xd;
  const double inf = residual.lpNorm<Eigen::Infinity>();
  return RateDesign{std::move(params), std::move(residual), inf, inf <= c.residual_tol};
}

std::vector<double> positivity_floor(const TaskGraph& graph, const Eigen::VectorXd& xd,
                                     const Eigen::VectorXd& beta, BetaCoupling coupling) {
  const std::size_t n = graph.ordered_edges().size();
  const RateParams p(graph, std::vector<double>(n, 0.0), beta, coupling);
  std::vector<double> floor(n);
  for (std::size_t e = 0; e < n; ++e) {
    floor[e] = p.edge_coupling(e) * xd(static_cast<Eigen::Index>(graph.ordered_edges()[e].to));
  }
  return floor;
}

Eigen::VectorXd greedy_beta_tuning(const RateParams& p, const Eigen::VectorXd& xd,
                                   const VarianceEvaluator& evaluator,
                                   const BetaTuningOptions& options) {
  const auto m = static_cast<Eigen::Index>(p.task_count());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd variance = evaluator(beta);

  for (int iter = 0; iter < options.max_iters; ++iter) {
    bool improved = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::VectorXd candidate = beta;
      candidate(i) += options.step;
      if (positivity_margin(p.with_beta(candidate), xd) <= 0.0) continue;

      const Eigen::VectorXd trial = evaluator(candidate);
      if (!(trial(i) < variance(i))) continue;
      bool disturbs = false;
      for (Eigen::Index k = 0; k < m; ++k) {
        if (k != i && trial(k) > variance(k) * (1.0 + options.disturbance_tolerance)) disturbs = true;
      }
      if (disturbs) continue;
      beta = std::move(candidate);
      variance = trial;
      improved = true;
    }
    if (!improved) break;
  }
  return beta;
}

VarianceEvaluator covariance_evaluator(RateParams p, Eigen::VectorXd xd) {
  return [p = std::move(p), xd = std::move(xd)](const Eigen::VectorXd& beta) -> Eigen::VectorXd {
    return steady_state_covariance(p.with_beta(beta), xd).diagonal();
  };
}

}  // namespace stochalloc
