#include "stochalloc/ensemble_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "stochalloc/error.hpp"

namespace stochalloc {
namespace {

constexpr double kRvEps = 1e-6;

// Mean vector and unbiased covariance over a flat list of states.
void moments_of(std::span<const PopulationState> samples, Eigen::VectorXd& mean,
                Eigen::MatrixXd& cov) {
  const auto m = static_cast<Eigen::Index>(samples.front().size());
  mean = Eigen::VectorXd::Zero(m);
  for (const auto& s : samples) mean += s.as_vector();
  mean /= static_cast<double>(samples.size());
  cov = Eigen::MatrixXd::Zero(m, m);
  if (samples.size() < 2) return;
  for (const auto& s : samples) {
    const Eigen::VectorXd d = s.as_vector() - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(samples.size() - 1);
}

void fill_rv(SummaryStats& stats) {
  const Eigen::Index m = stats.mean.size();
  stats.rv.resize(m);
  stats.rv_undefined.assign(static_cast<std::size_t>(m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    const RelativeVariance rv = relative_variance(stats.mean(i), stats.variance(i), kRvEps);
    stats.rv(i) = rv.value;
    stats.rv_undefined[static_cast<std::size_t>(i)] = rv.undefined;
  }
}

void check_uniform_width(std::span<const PopulationState> samples, std::size_t width) {
  for (const auto& s : samples) {
    if (s.size() != width) {
      throw Error(ErrorCode::kDimensionMismatch, "samples disagree on the number of tasks");
    }
  }
}

}  // namespace

std::vector<PopulationState> sample_trace(const Trace& trace, double burn_in, int n_samples) {
  if (!(burn_in < trace.t_end)) {
    throw Error(ErrorCode::kBurnInTooLate, "burn_in " + std::to_string(burn_in) +
                                               " is not before t_end " + std::to_string(trace.t_end));
  }
  if (burn_in < 0.0) throw Error(ErrorCode::kOutOfRange, "burn_in must be >= 0");
  if (n_samples < 1) throw Error(ErrorCode::kValidationError, "n_samples must be >= 1");

  std::vector<PopulationState> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  PopulationState x = trace.initial;
  std::size_t next_event = 0;
  const double span = trace.t_end - burn_in;
  for (int k = 0; k < n_samples; ++k) {
    const double t = n_samples == 1 ? burn_in
                                    : (k + 1 == n_samples ? trace.t_end
                                                          : burn_in + span * k / (n_samples - 1));
    while (next_event < trace.events.size() && trace.events[next_event].time <= t) {
      --x.counts[trace.events[next_event].from];
      ++x.counts[trace.events[next_event].to];
      ++next_event;
    }
    out.push_back(x);
  }
  return out;
}

SummaryStats summarize(std::span<const PopulationState> samples, double burn_in) {
  if (samples.empty()) throw Error(ErrorCode::kEmptySamples, "summarize needs at least one sample");
  check_uniform_width(samples, samples.front().size());
  SummaryStats stats;
  moments_of(samples, stats.mean, stats.covariance);
  stats.variance = stats.covariance.diagonal();
  stats.n_samples = static_cast<int>(samples.size());
  stats.burn_in = burn_in;
  stats.pooling = "single series; SE corrected by integrated autocorrelation time";
  fill_rv(stats);

  const Eigen::Index m = stats.mean.size();
  stats.standard_error.resize(m);
  std::vector<double> series(samples.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      series[k] = samples[k].counts[static_cast<std::size_t>(i)];
    }
    const double tau = integrated_autocorrelation_time(series);
    stats.standard_error(i) = std::sqrt(stats.variance(i) * tau / static_cast<double>(samples.size()));
  }
  return stats;
}

SummaryStats summarize_ensemble(std::span<const std::vector<PopulationState>> runs, double burn_in) {
  std::vector<PopulationState> pooled;
  for (const auto& run : runs) pooled.insert(pooled.end(), run.begin(), run.end());
  if (pooled.empty()) throw Error(ErrorCode::kEmptySamples, "ensemble has no samples");
  check_uniform_width(pooled, pooled.front().size());
  if (runs.size() < 2) {
    SummaryStats single = summarize(pooled, burn_in);
    return single;
  }

  SummaryStats stats;
  moments_of(pooled, stats.mean, stats.covariance);
  stats.variance = stats.covariance.diagonal();
  stats.n_samples = static_cast<int>(pooled.size());
  stats.n_runs = static_cast<int>(runs.size());
  stats.burn_in = burn_in;
  stats.pooling = "pooled independent runs; SE from per-run averages";
  fill_rv(stats);

  const Eigen::Index m = stats.mean.size();
  std::vector<Eigen::VectorXd> run_means;
  for (const auto& run : runs) {
    if (run.empty()) continue;
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(m);
    for (const auto& s : run) avg += s.as_vector();
    run_means.push_back(avg / static_cast<double>(run.size()));
  }
  Eigen::VectorXd grand = Eigen::VectorXd::Zero(m);
  for (const auto& v : run_means) grand += v;
  grand /= static_cast<double>(run_means.size());
  Eigen::VectorXd spread = Eigen::VectorXd::Zero(m);
  for (const auto& v : run_means) spread += (v - grand).cwiseAbs2();
  const double r = static_cast<double>(run_means.size());
  stats.standard_error = (spread / std::max(r - 1.0, 1.0) / r).cwiseSqrt();
  return stats;
}

std::vector<std::vector<PopulationState>> sample_ensemble(std::span<const Trace> traces,
                                                          double burn_in, int n_samples) {
  std::vector<std::vector<PopulationState>> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(sample_trace(t, burn_in, n_samples));
  return out;
}

RelativeVariance relative_variance(double mean, double variance, double eps) {
  if (mean > eps) return {variance / mean, false};
  return {0.0, true};
}

MultinomialMoments multinomial_oracle(const Eigen::VectorXd& xd, int robots) {
  if (robots < 0 || (xd.array() < 0.0).any() ||
      std::abs(xd.sum() - robots) > 1e-9 * std::max(1, robots)) {
    throw Error(ErrorCode::kInvalidDistribution,
                "desired distribution must be non-negative and sum to N=" + std::to_string(robots));
  }
  MultinomialMoments out;
  out.mean = xd;
  if (robots == 0) {
    out.variance = Eigen::VectorXd::Zero(xd.size());
    return out;
  }
  const Eigen::ArrayXd prob = xd.array() / robots;
  out.variance = (robots * prob * (1.0 - prob)).matrix();
  return out;
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 1.0;

  double tau = 1.0;
  for (std::size_t lag = 1; lag < n; ++lag) {
    double c = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) c += (series[k] - mean) * (series[k + lag] - mean);
    c /= static_cast<double>(n);
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0);
}

double mean_event_rate(std::span<const Trace> traces, double burn_in) {
  if (traces.empty()) throw Error(ErrorCode::kEmptySamples, "no traces");
  double total = 0.0;
  for (const auto& t : traces) {
    if (!(burn_in < t.t_end)) throw Error(ErrorCode::kBurnInTooLate, "burn_in beyond t_end");
    const auto count = std::count_if(t.events.begin(), t.events.end(),
                                     [&](const TransitionEvent& e) { return e.time > burn_in; });
    total += static_cast<double>(count) / (t.t_end - burn_in);
  }
  return total / static_cast<double>(traces.size());
}

ComparisonReport compare_report(const SummaryStats& observed, const PredictionSet& predicted,
                                std::string title) {
  const Eigen::Index m = observed.mean.size();
  auto check = [m](const Eigen::VectorXd& v, const char* what) {
    if (v.size() != m) {
      throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has the wrong number of tasks");
    }
  };
  check(predicted.mean, "predicted mean");
  if (predicted.covariance_variance) check(*predicted.covariance_variance, "covariance prediction");
  if (predicted.multinomial_variance) check(*predicted.multinomial_variance, "multinomial prediction");
  if (predicted.exact_variance) check(*predicted.exact_variance, "exact prediction");

  ComparisonReport report;
  report.title = std::move(title);
  report.pooling = observed.pooling;
  report.n_samples = observed.n_samples;
  report.n_runs = observed.n_runs;
  report.burn_in = observed.burn_in;
  report.notes = predicted.notes;
  for (Eigen::Index i = 0; i < m; ++i) {
    ReportRow row;
    row.task = static_cast<TaskId>(i);
    row.observed_mean = observed.mean(i);
    row.predicted_mean = predicted.mean(i);
    row.mean_delta = observed.mean(i) - predicted.mean(i);
    row.standard_error = observed.standard_error.size() == m ? observed.standard_error(i) : 0.0;
    row.observed_variance = observed.variance(i);
    row.observed_rv = relative_variance(observed.mean(i), observed.variance(i), kRvEps);
    if (predicted.covariance_variance) {
      row.covariance_variance = (*predicted.covariance_variance)(i);
      row.predicted_rv = relative_variance(predicted.mean(i), *row.covariance_variance, kRvEps);
    }
    if (predicted.multinomial_variance) row.multinomial_variance = (*predicted.multinomial_variance)(i);
    if (predicted.exact_variance) row.exact_variance = (*predicted.exact_variance)(i);
    if (!row.predicted_rv && row.exact_variance) {
      row.predicted_rv = relative_variance(predicted.mean(i), *row.exact_variance, kRvEps);
    }
    report.rows.push_back(row);
  }
  return report;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string fixed(double v, int width = 10, int precision = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%*.*f", width, precision, v);
  return buf;
}

std::string fixed_or_dash(const std::optional<double>& v) {
  return v ? fixed(*v) : std::string(10 - 1, ' ') + "-";
}

constexpr const char* kRvNote =
    "RV = variance / mean (the dimensionless spread reported per task); "
    "tasks with mean <= 1e-6 report RV 0 flagged undefined.";

}  // namespace

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json pr = nullptr;
    if (r.predicted_rv) pr = {{"value", r.predicted_rv->value}, {"undefined", r.predicted_rv->undefined}};
    rows_json.push_back({
        {"task", r.task + 1},
        {"observed_mean", r.observed_mean},
        {"predicted_mean", r.predicted_mean},
        {"mean_delta", r.mean_delta},
        {"standard_error", r.standard_error},
        {"observed_variance", r.observed_variance},
        {"covariance_variance", optional_number(r.covariance_variance)},
        {"multinomial_variance", optional_number(r.multinomial_variance)},
        {"exact_variance", optional_number(r.exact_variance)},
        {"observed_rv", {{"value", r.observed_rv.value}, {"undefined", r.observed_rv.undefined}}},
        {"predicted_rv", pr},
    });
  }
  return {
      {"schema_version", kSchemaVersion},
      {"title", title},
      {"pooling", pooling},
      {"n_samples", n_samples},
      {"n_runs", n_runs},
      {"burn_in", burn_in},
      {"rows", rows_json},
      {"notes", notes},
      {"note", kRvNote},
  };
}

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  if (!title.empty()) os << title << '\n';
  os << "samples=" << n_samples << " runs=" << n_runs << " burn_in=" << burn_in << " (" << pooling
     << ")\n";
  os << "task   obs_mean  pred_mean         SE    obs_var   cov_pred  multinom     cme_var     obs_RV    pred_RV\n";
  for (const auto& r : rows) {
    char task[16];
    std::snprintf(task, sizeof task, "%4zu ", r.task + 1);
    os << task << fixed(r.observed_mean) << ' ' << fixed(r.predicted_mean) << ' '
       << fixed(r.standard_error) << ' ' << fixed(r.observed_variance) << ' '
       << fixed_or_dash(r.covariance_variance) << ' ' << fixed_or_dash(r.multinomial_variance) << ' '
       << fixed_or_dash(r.exact_variance) << ' '
       << fixed(r.observed_rv.value) << (r.observed_rv.undefined ? "*" : " ")
       << (r.predicted_rv ? fixed(r.predicted_rv->value) : std::string(9, ' ') + "-") << '\n';
  }
  for (const auto& n : notes) os << n << '\n';
  os << kRvNote << '\n';
  return os.str();
}

}  // namespace stochalloc
