#include "stochalloc/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "stochalloc/error.hpp"
#include "stochalloc/master_equation.hpp"

namespace stochalloc {
namespace {

constexpr std::size_t kExactStateCap = 30000;

const std::vector<double> kExampleBeta = {0.05, 0.20, 0.11, 0.052};

std::string cell(double v, int precision = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%9.*f", precision, v);
  return buf;
}

ExperimentOutcome run_outcome(std::string label, const ExperimentConfig& config, unsigned threads) {
  const ResolvedModel model = resolve_model(config);
  const auto traces = run_traces(config, model.params, threads);
  ExperimentOutcome out;
  out.label = std::move(label);
  out.config = config;
  out.stats = analyze_traces(config, traces);
  out.report = compare_report(out.stats, predictions(model.params, config.desired_vector(), config.robots),
                              out.label);
  out.event_rate = mean_event_rate(traces, config.burn_in);
  return out;
}

}  // namespace

DesignConstraints design_constraints(const ExperimentConfig& config) {
  DesignConstraints c = config.design;
  if (config.keep_positive) {
    c.rate_floor = positivity_floor(config.graph(), config.desired_vector(), config.beta_vector(), config.coupling);
  }
  return c;
}

ResolvedModel resolve_model(const ExperimentConfig& config) {
  TaskGraph graph = config.graph();
  const Eigen::VectorXd beta = config.beta_vector();
  if (config.rates) {
    std::map<std::pair<TaskId, TaskId>, double> rates;
    for (const auto& r : *config.rates) rates[{r.from, r.to}] = r.rate;
    return {RateParams::from_map(std::move(graph), rates, beta, config.coupling), std::nullopt};
  }
  RateDesign design = design_rates(graph, config.desired_vector(), design_constraints(config));
  RateParams params = design.params.with_beta(beta).with_coupling(config.coupling);
  return {std::move(params), std::move(design)};
}

std::vector<Trace> run_traces(const ExperimentConfig& config, const RateParams& params, unsigned threads) {
  const auto runs = static_cast<std::size_t>(config.runs);
  switch (config.simulator) {
    case SimulatorKind::kSsa:
      return ssa_ensemble(params, config.initial_state(), config.t_end, runs, config.seed, threads);
    case SimulatorKind::kAgents:
      return agent_ensemble(params, config.initial_state(), config.t_end, config.dt, runs, config.seed,
                            threads);
    case SimulatorKind::kMoments:
      break;
  }
  throw Error(ErrorCode::kValidationError, "the moments simulator produces no traces");
}

SummaryStats analyze_traces(const ExperimentConfig& config, std::span<const Trace> traces) {
  const auto samples = sample_ensemble(traces, config.burn_in, config.samples);
  return summarize_ensemble(samples, config.burn_in);
}

PredictionSet predictions(const RateParams& params, const Eigen::VectorXd& xd, int robots) {
  PredictionSet out;
  out.mean = xd;
  if (positivity_margin(params, xd) < 0.0) {
    out.notes.push_back("closure prediction omitted: some move is folded at the target allocation");
  } else {
    try {
      out.covariance_variance = steady_state_covariance(params, xd).diagonal();
    } catch (const Error& e) {
      out.notes.push_back("closure prediction omitted: " + e.detail());
    }
  }
  if (composition_count(robots, params.task_count()) <= kExactStateCap) {
    const MasterEquation cme(params, robots, kExactStateCap);
    out.exact_variance = cme.moments(cme.stationary()).covariance().diagonal();
  }
  if ((params.beta().array() == 0.0).all()) {
    out.multinomial_variance = multinomial_oracle(xd, robots).variance;
  }
  return out;
}

ExperimentConfig example1_config() {
  ExperimentConfig c;
  c.name = "example1";
  c.tasks = 4;
  c.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  c.beta = kExampleBeta;
  c.robots = 30;
  c.initial = {5, 15, 5, 5};
  c.desired = {13, 9, 6, 2};
  c.t_end = 20.0;
  c.dt = 1e-3;
  c.runs = 500;
  c.burn_in = 2.0;
  c.samples = 130;
  c.seed = 1;
  c.design.diag_min = 1.5;
  return c;
}

ExperimentConfig example2_config(int robots, bool with_beta, double diag_min) {
  ExperimentConfig c = example1_config();
  c.name = "example2_n" + std::to_string(robots);
  c.beta = with_beta ? kExampleBeta : std::vector<double>(4, 0.0);
  c.robots = robots;
  c.initial = largest_remainder({0.25, 0.25, 0.0, 0.5}, robots);
  const auto xd = largest_remainder({0.5, 0.5, 0.0, 0.0}, robots);
  c.desired.assign(xd.begin(), xd.end());
  c.samples = 160;
  c.design.diag_min = diag_min;
  validate(c);
  return c;
}

std::vector<ReferenceColumn> example1_reference() {
  return {
      {"beta=0", {12.16, 9.76, 5.18, 2.77}, {5.78, 6.83, 4.20, 1.44}, {}},
      {"beta!=0", {12.26, 9.30, 5.83, 2.60}, {1.06, 1.12, 1.15, 0.45}, {}},
  };
}

std::vector<ReferenceColumn> example2_reference() {
  return {
      {"beta=0 N=52", {24.8, 26.5, 0.5, 0.2}, {}, {0.49, 0.54, 0.97, 0.75}},
      {"beta=0 N=26", {12.8, 12.7, 0.0, 0.0}, {}, {0.62, 0.63, 0.1, 0.1}},
      {"beta=0 N=16", {8.2, 7.7, 0.0, 0.0}, {}, {0.61, 0.69, 0.0, 0.0}},
      {"beta!=0 N=52", {25.2, 25.6, 0.6, 0.4}, {}, {0.21, 0.21, 0.88, 1.38}},
      {"beta!=0 N=26", {13.3, 14.6, 0.0, 0.0}, {}, {0.36, 0.23, 0.00, 0.00}},
      {"beta!=0 N=16", {7.5, 8.3, 0.1, 0.0}, {}, {0.53, 0.47, 1.56, 0.00}},
  };
}

Reproduction reproduce_example1(std::uint64_t seed, int runs, unsigned threads) {
  Reproduction r;
  r.name = "example1";
  r.reference = example1_reference();
  ExperimentConfig with = example1_config();
  with.seed = seed;
  if (runs > 0) with.runs = runs;
  ExperimentConfig without = with;
  without.beta.assign(4, 0.0);
  r.outcomes.push_back(run_outcome("beta=0", without, threads));
  r.outcomes.push_back(run_outcome("beta!=0", with, threads));
  return r;
}

Reproduction reproduce_example2(std::uint64_t seed, int runs, unsigned threads) {
  Reproduction r;
  r.name = "example2";
  r.reference = example2_reference();
  auto add = [&](bool with_beta, int robots, double diag_min, bool floor, const std::string& suffix) {
    ExperimentConfig c = example2_config(robots, with_beta, diag_min);
    c.keep_positive = floor;
    c.seed = seed;
    if (runs > 0) c.runs = runs;
    r.outcomes.push_back(run_outcome(std::string(with_beta ? "beta!=0" : "beta=0") + " N=" +
                                         std::to_string(robots) + suffix,
                                     c, threads));
  };
  for (bool with_beta : {false, true}) {
    for (int n : {52, 26, 16}) add(with_beta, n, 4.0, true, "");
  }
  add(false, 52, 1.5, false, " diag_min=1.5 no floor");
  add(true, 52, 1.5, false, " diag_min=1.5 no floor");
  return r;
}

nlohmann::json Reproduction::to_json() const {
  nlohmann::json outcomes_json = nlohmann::json::array();
  for (const auto& o : outcomes) {
    outcomes_json.push_back({{"label", o.label},
                             {"config", config_to_json(o.config)},
                             {"event_rate", o.event_rate},
                             {"report", o.report.to_json()}});
  }
  nlohmann::json ref = nlohmann::json::array();
  for (const auto& c : reference) {
    ref.push_back({{"label", c.label}, {"mean", c.mean}, {"variance", c.variance}, {"rv", c.rv}});
  }
  return {{"schema_version", ComparisonReport::kSchemaVersion},
          {"name", name},
          {"outcomes", outcomes_json},
          {"reference", ref}};
}

std::string Reproduction::to_text() const {
  std::ostringstream os;
  os << "== " << name << " ==\n\n";
  for (const auto& o : outcomes) {
    os << o.report.to_text() << "moves per unit time after burn-in: " << cell(o.event_rate) << "\n\n";
  }

  // Published numbers next to the matching ensemble estimates.
  os << "published vs this run\n";
  for (const auto& ref : reference) {
    const ExperimentOutcome* match = nullptr;
    for (const auto& o : outcomes) {
      if (o.label == ref.label) match = &o;
    }
    if (match == nullptr) continue;
    os << ref.label << '\n';
    os << "task  pub_mean  run_mean";
    if (!ref.variance.empty()) os << "   pub_var   run_var";
    if (!ref.rv.empty()) os << "    pub_RV    run_RV";
    os << '\n';
    for (std::size_t i = 0; i < ref.mean.size(); ++i) {
      char task[8];
      std::snprintf(task, sizeof task, "%4zu", i + 1);
      os << task << ' ' << cell(ref.mean[i]) << ' ' << cell(match->stats.mean(static_cast<Eigen::Index>(i)));
      if (!ref.variance.empty()) {
        os << ' ' << cell(ref.variance[i]) << ' ' << cell(match->stats.variance(static_cast<Eigen::Index>(i)));
      }
      if (!ref.rv.empty()) {
        os << ' ' << cell(ref.rv[i]) << ' ' << cell(match->stats.rv(static_cast<Eigen::Index>(i)));
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace stochalloc
