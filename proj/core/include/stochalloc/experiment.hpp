#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochalloc/config.hpp"
#include "stochalloc/ensemble_stats.hpp"
#include "stochalloc/gain_design.hpp"
#include "stochalloc/gillespie.hpp"
#include "stochalloc/moment_dynamics.hpp"

namespace stochalloc {

struct ResolvedModel {
  RateParams params;
  std::optional<RateDesign> design;  // set when the config left the rates out
};

/// The config's design constraints plus the positivity floor when
/// keep_positive is set.
DesignConstraints design_constraints(const ExperimentConfig& config);

/// Uses the config's rates when present, otherwise designs them.
ResolvedModel resolve_model(const ExperimentConfig& config);

/// Runs config.runs traces with seeds config.seed.. using the configured
/// stochastic simulator. kValidationError for the moments simulator.
std::vector<Trace> run_traces(const ExperimentConfig& config, const RateParams& params,
                              unsigned threads = 0);

/// Samples every trace and pools the runs.
SummaryStats analyze_traces(const ExperimentConfig& config, std::span<const Trace> traces);

/// Mean xd, the stationary covariance solve (omitted when singular or when a
/// move is folded at xd), the multinomial law when beta is zero, and the
/// exact stationary variance when the state space has at most 30000 states.
PredictionSet predictions(const RateParams& params, const Eigen::VectorXd& xd, int robots);

ExperimentConfig example1_config();
/// Example 2 at team size `robots`; beta is zero or the Example-1 values.
ExperimentConfig example2_config(int robots, bool with_beta, double diag_min = 4.0);

/// Values printed in the original experiments, for side-by-side reporting.
struct ReferenceColumn {
  std::string label;
  std::vector<double> mean;
  std::vector<double> variance;  // empty when only RV was printed
  std::vector<double> rv;
};
std::vector<ReferenceColumn> example1_reference();
std::vector<ReferenceColumn> example2_reference();

struct ExperimentOutcome {
  std::string label;
  ExperimentConfig config;
  SummaryStats stats;
  ComparisonReport report;
  double event_rate = 0.0;
};

struct Reproduction {
  std::string name;
  std::vector<ExperimentOutcome> outcomes;
  std::vector<ReferenceColumn> reference;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Example 1 with and without beta. `runs` <= 0 keeps the config value.
Reproduction reproduce_example1(std::uint64_t seed, int runs, unsigned threads = 0);
/// Example 2 for N in {52, 26, 16} with and without beta, plus the N = 52
/// pair at the lower convergence bound diag_min = 1.5 without the
/// positivity floor.
Reproduction reproduce_example2(std::uint64_t seed, int runs, unsigned threads = 0);

}  // namespace stochalloc
