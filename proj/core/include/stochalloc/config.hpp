#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochalloc/gain_design.hpp"
#include "stochalloc/rate_model.hpp"
#include "stochalloc/task_graph.hpp"

namespace stochalloc {

enum class SimulatorKind { kSsa, kAgents, kMoments };

std::string to_string(SimulatorKind kind);
SimulatorKind simulator_from_string(const std::string& name);  // throws kParseError

struct RateEntry {
  TaskId from = 0;
  TaskId to = 0;
  double rate = 0.0;
  friend bool operator==(const RateEntry&, const RateEntry&) = default;
};

/// Everything one experiment needs. Task indices are 0-based in memory and
/// 1-based on disk.
///
/// Defaults for absent JSON fields: rates -> designed, beta -> zeros,
/// beta_coupling -> "symmetric", t_end 20, dt 1e-3, runs 100, burn_in 2,
/// samples 130, seed 1, design {1.5, inf, 1e-8, keep_positive true}, simulator "ssa".
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  std::size_t tasks = 0;
  std::vector<std::pair<TaskId, TaskId>> edges;
  std::optional<std::vector<RateEntry>> rates;
  std::vector<double> beta;
  BetaCoupling coupling = BetaCoupling::kSymmetric;
  int robots = 0;
  std::vector<int> initial;
  std::vector<double> desired;
  double t_end = 20.0;
  double dt = 1e-3;
  int runs = 100;
  double burn_in = 2.0;
  int samples = 130;
  std::uint64_t seed = 1;
  DesignConstraints design;
  // Designed rates stay above positivity_floor for this beta.
  bool keep_positive = true;
  SimulatorKind simulator = SimulatorKind::kSsa;

  TaskGraph graph() const;
  PopulationState initial_state() const { return PopulationState{initial}; }
  Eigen::VectorXd desired_vector() const;
  Eigen::VectorXd beta_vector() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

/// Throws kValidationError naming the first violated invariant.
void validate(const ExperimentConfig& config);

/// Integer counts proportional to `fractions` summing to `total`
/// (largest remainder, ties to the lower index).
std::vector<int> largest_remainder(const std::vector<double>& fractions, int total);

/// Parses and validates. kParseError carries the line/column or the field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);
void write_config(const ExperimentConfig& config, const std::filesystem::path& path);

}  // namespace stochalloc
