#include "stochalloc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "stochalloc/error.hpp"

namespace stochalloc {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParseError, "field '" + field + "': " + what);
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kValidationError, what);
}

const std::set<std::string> kTopLevelKeys = {
    "schema_version", "name", "graph",   "rates", "beta",    "beta_coupling",
    "robots",         "initial", "desired", "t_end", "dt",     "runs",
    "burn_in",        "samples", "seed",    "design", "simulator"};

template <typename T>
T as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    parse_fail(field, std::string("wrong type (") + j.type_name() + ")");
  }
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, std::string("expected a number, got ") + j.type_name());
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) parse_fail(field, std::string("expected an integer, got ") + j.type_name());
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    parse_fail(field, "integer out of range");
  }
  return static_cast<int>(v);
}

TaskId as_task(const json& j, const std::string& field) {
  const int v = as_int(j, field);
  if (v < 1) parse_fail(field, "task indices start at 1");
  return static_cast<TaskId>(v - 1);
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(key, "missing");
  return *it;
}

std::vector<double> number_list(const json& j, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(as_number(j[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

// Either explicit per-task values or {"fractions": [...]} of the team size.
std::vector<double> distribution(const json& j, const std::string& field, int robots) {
  if (j.is_object()) {
    const auto fractions = number_list(require(j, "fractions"), field + ".fractions");
    for (double f : fractions) {
      if (f < 0.0) invalid(field + ": fractions must be >= 0");
    }
    const double total = std::accumulate(fractions.begin(), fractions.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) invalid(field + ": fractions must sum to 1");
    const auto counts = largest_remainder(fractions, robots);
    return {counts.begin(), counts.end()};
  }
  return number_list(j, field);
}

bool same_design(const DesignConstraints& a, const DesignConstraints& b) {
  return a.diag_min == b.diag_min && a.r_max == b.r_max && a.residual_tol == b.residual_tol;
}

}  // namespace

std::string to_string(SimulatorKind kind) {
  switch (kind) {
    case SimulatorKind::kSsa: return "ssa";
    case SimulatorKind::kAgents: return "agents";
    case SimulatorKind::kMoments: return "moments";
  }
  return "?";
}

SimulatorKind simulator_from_string(const std::string& name) {
  if (name == "ssa") return SimulatorKind::kSsa;
  if (name == "agents") return SimulatorKind::kAgents;
  if (name == "moments") return SimulatorKind::kMoments;
  parse_fail("simulator", "unknown simulator '" + name + "' (ssa, agents, moments)");
}

TaskGraph ExperimentConfig::graph() const { return TaskGraph::build(tasks, edges); }

Eigen::VectorXd ExperimentConfig::desired_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(desired.data(), static_cast<Eigen::Index>(desired.size()));
}

Eigen::VectorXd ExperimentConfig::beta_vector() const {
  if (beta.empty()) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tasks));
  return Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.name == b.name && a.tasks == b.tasks && a.edges == b.edges && a.rates == b.rates &&
         a.beta == b.beta && a.coupling == b.coupling && a.robots == b.robots &&
         a.initial == b.initial && a.desired == b.desired && a.t_end == b.t_end && a.dt == b.dt &&
         a.runs == b.runs && a.burn_in == b.burn_in && a.samples == b.samples && a.seed == b.seed &&
         same_design(a.design, b.design) && a.keep_positive == b.keep_positive &&
         a.simulator == b.simulator;
}

std::vector<int> largest_remainder(const std::vector<double>& fractions, int total) {
  std::vector<int> counts(fractions.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * total;
    counts[i] = static_cast<int>(std::floor(exact + 1e-12));
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
    ++counts[remainders[k].second];
  }
  return counts;
}

void validate(const ExperimentConfig& c) {
  if (c.tasks == 0) invalid("graph.tasks must be >= 1");
  TaskGraph graph = [&] {
    try {
      return c.graph();
    } catch (const Error& e) {
      invalid("graph: " + e.detail());
    }
  }();
  const std::size_t m = c.tasks;
  if (c.robots < 1) invalid("robots must be >= 1");
  if (c.initial.size() != m) invalid("initial must have one entry per task");
  if (c.desired.size() != m) invalid("desired must have one entry per task");
  if (std::any_of(c.initial.begin(), c.initial.end(), [](int v) { return v < 0; })) {
    invalid("initial counts must be >= 0");
  }
  if (std::accumulate(c.initial.begin(), c.initial.end(), 0) != c.robots) {
    invalid("initial counts must sum to robots (" + std::to_string(c.robots) + ")");
  }
  if (std::any_of(c.desired.begin(), c.desired.end(), [](double v) { return !(v >= 0.0); })) {
    invalid("desired counts must be >= 0");
  }
  const double xd_total = std::accumulate(c.desired.begin(), c.desired.end(), 0.0);
  if (std::abs(xd_total - c.robots) > 1e-9 * c.robots) {
    invalid("desired counts must sum to robots (" + std::to_string(c.robots) + ")");
  }
  if (!c.beta.empty() && c.beta.size() != m) invalid("beta must have one entry per task");
  if (std::any_of(c.beta.begin(), c.beta.end(), [](double v) { return !(v >= 0.0); })) {
    invalid("beta must be >= 0");
  }
  if (c.rates) {
    std::set<std::pair<TaskId, TaskId>> seen;
    for (const auto& r : *c.rates) {
      if (r.from >= m || r.to >= m || !graph.adjacent(r.from, r.to)) {
        invalid("rate " + std::to_string(r.from + 1) + "->" + std::to_string(r.to + 1) +
                " does not follow a graph edge");
      }
      if (!(r.rate >= 0.0) || !std::isfinite(r.rate)) invalid("rates must be finite and >= 0");
      if (!seen.emplace(r.from, r.to).second) invalid("rate listed twice");
    }
  }
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) invalid("t_end must be > 0");
  if (!(c.dt > 0.0)) invalid("dt must be > 0");
  if (c.runs < 1) invalid("runs must be >= 1");
  if (!(c.burn_in >= 0.0) || !(c.burn_in < c.t_end)) invalid("burn_in must lie in [0, t_end)");
  if (c.samples < 1) invalid("samples must be >= 1");
  if (!(c.design.diag_min >= 0.0)) invalid("design.diag_min must be >= 0");
  if (!(c.design.r_max > 0.0)) invalid("design.r_max must be > 0");
  if (!(c.design.residual_tol > 0.0)) invalid("design.residual_tol must be > 0");
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevelKeys.count(key)) parse_fail(key, "unknown field");
  }

  ExperimentConfig c;
  if (doc.contains("schema_version")) {
    const int v = as_int(doc["schema_version"], "schema_version");
    if (v != ExperimentConfig::kSchemaVersion) parse_fail("schema_version", "unsupported version");
  }
  if (doc.contains("name")) c.name = as<std::string>(doc["name"], "name");

  const json& g = require(doc, "graph");
  const int tasks = as_int(require(g, "tasks"), "graph.tasks");
  if (tasks < 1) invalid("graph.tasks must be >= 1");
  c.tasks = static_cast<std::size_t>(tasks);
  const json& edges = require(g, "edges");
  if (!edges.is_array()) parse_fail("graph.edges", "expected an array of [a, b] pairs");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string field = "graph.edges[" + std::to_string(k) + "]";
    if (!edges[k].is_array() || edges[k].size() != 2) parse_fail(field, "expected [a, b]");
    c.edges.emplace_back(as_task(edges[k][0], field), as_task(edges[k][1], field));
  }

  if (doc.contains("rates") && !doc["rates"].is_null()) {
    const json& rates = doc["rates"];
    if (!rates.is_array()) parse_fail("rates", "expected an array");
    std::vector<RateEntry> entries;
    for (std::size_t k = 0; k < rates.size(); ++k) {
      const std::string field = "rates[" + std::to_string(k) + "]";
      entries.push_back({as_task(require(rates[k], "from"), field + ".from"),
                         as_task(require(rates[k], "to"), field + ".to"),
                         as_number(require(rates[k], "rate"), field + ".rate")});
    }
    c.rates = std::move(entries);
  }
  if (doc.contains("beta")) c.beta = number_list(doc["beta"], "beta");
  if (doc.contains("beta_coupling")) {
    const auto mode = as<std::string>(doc["beta_coupling"], "beta_coupling");
    if (mode == "symmetric") {
      c.coupling = BetaCoupling::kSymmetric;
    } else if (mode == "departure") {
      c.coupling = BetaCoupling::kDepartureSide;
    } else {
      parse_fail("beta_coupling", "expected 'symmetric' or 'departure'");
    }
  }

  c.robots = as_int(require(doc, "robots"), "robots");
  if (c.robots < 1) invalid("robots must be >= 1");
  {
    const auto x0 = distribution(require(doc, "initial"), "initial", c.robots);
    for (std::size_t k = 0; k < x0.size(); ++k) {
      if (x0[k] != std::floor(x0[k])) parse_fail("initial[" + std::to_string(k) + "]", "expected an integer count");
      c.initial.push_back(static_cast<int>(x0[k]));
    }
  }
  c.desired = distribution(require(doc, "desired"), "desired", c.robots);

  if (doc.contains("t_end")) c.t_end = as_number(doc["t_end"], "t_end");
  if (doc.contains("dt")) c.dt = as_number(doc["dt"], "dt");
  if (doc.contains("runs")) c.runs = as_int(doc["runs"], "runs");
  if (doc.contains("burn_in")) c.burn_in = as_number(doc["burn_in"], "burn_in");
  if (doc.contains("samples")) c.samples = as_int(doc["samples"], "samples");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) parse_fail("seed", "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("design")) {
    const json& d = doc["design"];
    if (!d.is_object()) parse_fail("design", "expected an object");
    for (const auto& [key, value] : d.items()) {
      if (key != "diag_min" && key != "r_max" && key != "residual_tol" && key != "keep_positive") {
        parse_fail("design." + key, "unknown field");
      }
    }
    if (d.contains("diag_min")) c.design.diag_min = as_number(d["diag_min"], "design.diag_min");
    if (d.contains("r_max") && !d["r_max"].is_null()) c.design.r_max = as_number(d["r_max"], "design.r_max");
    if (d.contains("residual_tol")) c.design.residual_tol = as_number(d["residual_tol"], "design.residual_tol");
    if (d.contains("keep_positive")) c.keep_positive = as<bool>(d["keep_positive"], "design.keep_positive");
  }
  if (doc.contains("simulator")) c.simulator = simulator_from_string(as<std::string>(doc["simulator"], "simulator"));

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json edges = json::array();
  for (const auto& [a, b] : c.edges) edges.push_back({a + 1, b + 1});
  json out = {
      {"schema_version", ExperimentConfig::kSchemaVersion},
      {"name", c.name},
      {"graph", {{"tasks", c.tasks}, {"edges", edges}}},
  };
  if (c.rates) {
    json rates = json::array();
    for (const auto& r : *c.rates) rates.push_back({{"from", r.from + 1}, {"to", r.to + 1}, {"rate", r.rate}});
    out["rates"] = rates;
  }
  out["beta"] = c.beta;
  out["beta_coupling"] = c.coupling == BetaCoupling::kSymmetric ? "symmetric" : "departure";
  out["robots"] = c.robots;
  out["initial"] = c.initial;
  out["desired"] = c.desired;
  out["t_end"] = c.t_end;
  out["dt"] = c.dt;
  out["runs"] = c.runs;
  out["burn_in"] = c.burn_in;
  out["samples"] = c.samples;
  out["seed"] = c.seed;
  out["design"] = {{"diag_min", c.design.diag_min},
                   {"r_max", std::isfinite(c.design.r_max) ? json(c.design.r_max) : json(nullptr)},
                   {"residual_tol", c.design.residual_tol},
                   {"keep_positive", c.keep_positive}};
  out["simulator"] = to_string(c.simulator);
  return out;
}

void write_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kValidationError, "cannot write " + path.string());
  out << config_to_json(config).dump(2) << '\n';
}

}  // namespace stochalloc
