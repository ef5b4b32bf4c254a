#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "stochalloc/gillespie.hpp"
#include "stochalloc/rate_model.hpp"

namespace stochalloc {

/// States at n_samples equally spaced times in [burn_in, t_end]
/// (a single sample sits at burn_in). Throws kBurnInTooLate when
/// burn_in >= t_end.
std::vector<PopulationState> sample_trace(const Trace& trace, double burn_in, int n_samples);

struct SummaryStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd rv;                 // variance / mean
  std::vector<bool> rv_undefined;     // mean <= eps
  Eigen::VectorXd standard_error;     // of the mean
  int n_samples = 0;
  int n_runs = 1;
  double burn_in = 0.0;
  std::string pooling;                // how the samples were pooled and SE computed
};

/// Sample mean and unbiased covariance of one time series. The standard
/// error is corrected by the integrated autocorrelation time of each task.
SummaryStats summarize(std::span<const PopulationState> samples, double burn_in = 0.0);

/// Pools the samples of independent runs. The standard error comes from the
/// spread of per-run averages, which are independent by construction.
SummaryStats summarize_ensemble(std::span<const std::vector<PopulationState>> runs,
                                double burn_in = 0.0);

/// Samples every trace with sample_trace.
std::vector<std::vector<PopulationState>> sample_ensemble(std::span<const Trace> traces,
                                                          double burn_in, int n_samples);

struct RelativeVariance {
  double value = 0.0;
  bool undefined = false;
};

/// variance / mean, or 0 flagged undefined when mean <= eps.
RelativeVariance relative_variance(double mean, double variance, double eps = 1e-6);

struct MultinomialMoments {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Stationary law of N independent robots with occupation probabilities
/// xd / N. Throws kInvalidDistribution when sum(xd) != N or xd < 0.
MultinomialMoments multinomial_oracle(const Eigen::VectorXd& xd, int robots);

/// Sokal-windowed integrated autocorrelation time (window c = 5); 1 for
/// white noise, larger for correlated series. Returns 1 for constant input.
double integrated_autocorrelation_time(std::span<const double> series);

/// Moves per unit time after burn_in, averaged over traces.
double mean_event_rate(std::span<const Trace> traces, double burn_in);

struct PredictionSet {
  Eigen::VectorXd mean;
  std::optional<Eigen::VectorXd> covariance_variance;   // closed-form stationary solve
  std::optional<Eigen::VectorXd> multinomial_variance;  // beta = 0 only
  std::optional<Eigen::VectorXd> exact_variance;        // master equation, small N
  std::vector<std::string> notes;
};

struct ReportRow {
  TaskId task = 0;
  double observed_mean = 0.0;
  double predicted_mean = 0.0;
  double mean_delta = 0.0;
  double standard_error = 0.0;
  double observed_variance = 0.0;
  std::optional<double> covariance_variance;
  std::optional<double> multinomial_variance;
  std::optional<double> exact_variance;
  RelativeVariance observed_rv;
  std::optional<RelativeVariance> predicted_rv;
};

struct ComparisonReport {
  static constexpr int kSchemaVersion = 1;

  std::string title;
  std::string pooling;
  int n_samples = 0;
  int n_runs = 0;
  double burn_in = 0.0;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Side-by-side observed vs predicted statistics per task.
ComparisonReport compare_report(const SummaryStats& observed, const PredictionSet& predicted,
                                std::string title = {});

}  // namespace stochalloc
