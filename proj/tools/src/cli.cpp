#include "stochalloc/tools/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "stochalloc/error.hpp"
#include "stochalloc/experiment.hpp"
#include "stochalloc/tools/artifacts.hpp"

namespace stochalloc::tools {
namespace fs = std::filesystem;
namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> simulator;
  std::string out;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_sim) {
  cmd->add_option("--config", o.config, "experiment JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  if (!with_sim) return;
  cmd->add_option("--seed", o.seed, "base seed (overrides the config)");
  cmd->add_option("--runs", o.runs, "number of runs (overrides the config)");
  cmd->add_option("--simulator", o.simulator, "ssa, agents or moments")
      ->check(CLI::IsMember({"ssa", "agents", "moments"}));
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

ExperimentConfig load_with(const Overrides& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.runs) c.runs = *o.runs;
  if (o.simulator) c.simulator = simulator_from_string(*o.simulator);
  validate(c);
  return c;
}

fs::path out_dir(const Overrides& o, const std::string& fallback) {
  return o.out.empty() ? fs::path("stochalloc-out") / fallback : fs::path(o.out);
}

// The config as actually run: designed rates written out explicitly.
ExperimentConfig resolved(ExperimentConfig c, const RateParams& params) {
  std::vector<RateEntry> rates;
  const auto& ordered = params.graph().ordered_edges();
  for (std::size_t e = 0; e < ordered.size(); ++e) rates.push_back({ordered[e].from, ordered[e].to, params.rate(e)});
  c.rates = std::move(rates);
  return c;
}

std::string format_rates(const RateParams& p) {
  std::string s = "from  to        rate\n";
  char buf[64];
  const auto& ordered = p.graph().ordered_edges();
  for (std::size_t e = 0; e < ordered.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%4zu %3zu %11.6f\n", ordered[e].from + 1, ordered[e].to + 1, p.rate(e));
    s += buf;
  }
  return s;
}

std::vector<MomentSample> moment_curves(const ExperimentConfig& c, const RateParams& params) {
  const double h = std::min(c.dt, default_moment_timestep(assemble_gain_matrix(params)));
  const int steps = static_cast<int>(std::ceil(c.t_end / h));
  const int every = std::max(1, steps / 1000);
  return integrate_moments(params, c.initial_state().as_vector(), c.t_end, h, every);
}

int cmd_validate(const Overrides& o, std::ostream& out) {
  const ExperimentConfig c = load_config(o.config);
  out << "ok: " << (c.name.empty() ? o.config : c.name) << ", " << c.tasks << " tasks, "
      << c.edges.size() << " edges, N=" << c.robots << ", rates "
      << (c.rates ? "given" : "designed at run time") << '\n';
  return 0;
}

int cmd_design(const Overrides& o, std::ostream& out) {
  const ExperimentConfig c = load_config(o.config);
  const RateDesign d = design_rates(c.graph(), c.desired_vector(), design_constraints(c));
  const GainMatrix k = assemble_gain_matrix(d.params);
  const StationarityCheck check = verify_stationarity(k, c.desired_vector(), c.design.residual_tol);
  out << format_rates(d.params);
  char buf[128];
  std::snprintf(buf, sizeof buf, "||K xd||_inf = %.3e (%s), spectrum %s\n", d.residual_inf,
                d.exact ? "exact" : "best effort", check.spectrum_ok ? "ok" : "NOT ok");
  out << buf;

  nlohmann::json eig = nlohmann::json::array();
  for (const auto& l : check.eigenvalues) eig.push_back({l.real(), l.imag()});
  std::vector<double> residual(d.residual.data(), d.residual.data() + d.residual.size());
  nlohmann::json rates = nlohmann::json::array();
  const auto edges = d.params.graph().ordered_edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    rates.push_back({{"from", edges[e].from + 1}, {"to", edges[e].to + 1}, {"rate", d.params.rate(e)}});
  }
  nlohmann::json gain = nlohmann::json::array();
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(k.size()));
    for (Eigen::Index j = 0; j < k.size(); ++j) row[static_cast<std::size_t>(j)] = k(i, j);
    gain.push_back(row);
  }
  const nlohmann::json report = {{"schema_version", ComparisonReport::kSchemaVersion},
                                 {"rates", rates},
                                 {"K", gain},
                                 {"residual", residual},
                                 {"residual_inf", d.residual_inf},
                                 {"exact", d.exact},
                                 {"spectrum_ok", check.spectrum_ok},
                                 {"eigenvalues", eig}};
  const fs::path dir = out_dir(o, "design");
  write_config(resolved(c, d.params.with_beta(c.beta_vector()).with_coupling(c.coupling)), dir / "config.json");
  write_text(dir / "design.json", report.dump(2) + "\n");
  append_log(dir, "design " + o.config);
  return d.exact ? 0 : 1;
}

int cmd_moments(const ExperimentConfig& c, const RateParams& params, const fs::path& dir) {
  write_moments(moment_curves(c, params), dir / "moments.csv");
  return 0;
}

int cmd_simulate(const Overrides& o, std::ostream& out) {
  const ExperimentConfig c = load_with(o);
  const ResolvedModel model = resolve_model(c);
  const fs::path dir = out_dir(o, c.name.empty() ? "simulate" : c.name);
  write_config(resolved(c, model.params), dir / "config.json");
  append_log(dir, "simulate " + o.config + " seed=" + std::to_string(c.seed) + " runs=" + std::to_string(c.runs));
  if (c.simulator == SimulatorKind::kMoments) {
    out << "wrote " << (dir / "moments.csv").string() << '\n';
    return cmd_moments(c, model.params, dir);
  }
  const auto traces = run_traces(c, model.params, o.threads);
  const int width = std::max(4, static_cast<int>(std::to_string(traces.size()).size()));
  for (std::size_t r = 0; r < traces.size(); ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%0*zu.csv", width, r + 1);
    write_trace(traces[r], model.params, dir / "traces" / name);
  }
  out << "wrote " << traces.size() << " traces to " << (dir / "traces").string() << '\n';
  return 0;
}

int cmd_analyze(const Overrides& o, const std::string& from, std::ostream& out) {
  ExperimentConfig c;
  std::vector<Trace> traces;
  fs::path dir;
  if (!from.empty()) {
    c = load_config(fs::path(from) / "config.json");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(fs::path(from) / "traces")) {
      if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) traces.push_back(read_trace(f));
    if (traces.empty()) throw Error(ErrorCode::kEmptySamples, "no traces under " + from);
    dir = o.out.empty() ? fs::path(from) : fs::path(o.out);
  } else {
    if (o.config.empty()) throw Error(ErrorCode::kValidationError, "analyze needs --config or --from");
    c = load_with(o);
    dir = out_dir(o, c.name.empty() ? "analyze" : c.name);
  }
  const ResolvedModel model = resolve_model(c);
  if (from.empty()) {
    if (c.simulator == SimulatorKind::kMoments) {
      throw Error(ErrorCode::kValidationError, "analyze needs a stochastic simulator");
    }
    traces = run_traces(c, model.params, o.threads);
    write_config(resolved(c, model.params), dir / "config.json");
  }
  const SummaryStats stats = analyze_traces(c, traces);
  ComparisonReport report = compare_report(stats, predictions(model.params, c.desired_vector(), c.robots),
                                           c.name);
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(dir / "report.txt", report.to_text());
  write_stats({{c.name.empty() ? "run" : c.name, stats}}, dir / "stats.csv");
  cmd_moments(c, model.params, dir);
  append_log(dir, "analyze seed=" + std::to_string(c.seed) + " runs=" + std::to_string(traces.size()));
  out << report.to_text();
  return 0;
}

int cmd_reproduce(const std::string& which, const Overrides& o, std::ostream& out) {
  const std::uint64_t seed = o.seed.value_or(1);
  const int runs = o.runs.value_or(0);
  if (o.runs && runs < 1) throw Error(ErrorCode::kValidationError, "runs must be >= 1");
  const Reproduction r = which == "example1" ? reproduce_example1(seed, runs, o.threads)
                                             : reproduce_example2(seed, runs, o.threads);
  const fs::path dir = out_dir(o, which);
  std::vector<std::pair<std::string, SummaryStats>> stats;
  for (const auto& outcome : r.outcomes) {
    stats.emplace_back(outcome.label, outcome.stats);
    std::string file = outcome.label;
    std::replace_if(file.begin(), file.end(), [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)); }, '_');
    write_config(outcome.config, dir / "configs" / (file + ".json"));
  }
  write_stats(stats, dir / "stats.csv");
  write_text(dir / "report.json", r.to_json().dump(2) + "\n");
  write_text(dir / "report.txt", r.to_text());
  append_log(dir, "reproduce " + which + " seed=" + std::to_string(seed));
  out << r.to_text();
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design, simulate and analyse stochastic task allocation for robot ensembles", "stochalloc"};
  app.require_subcommand(1);

  Overrides o;
  std::string from;
  std::string which;
  auto* validate_cmd = app.add_subcommand("validate", "check a config file");
  validate_cmd->add_option("--config", o.config, "experiment JSON")->required()->check(CLI::ExistingFile);
  auto* design_cmd = app.add_subcommand("design", "compute transition rates for the desired allocation");
  add_common(design_cmd, o, false);
  auto* simulate_cmd = app.add_subcommand("simulate", "write trajectories (or moment curves)");
  add_common(simulate_cmd, o, true);
  auto* moments_cmd = app.add_subcommand("moments", "integrate the mean and second-moment equations");
  add_common(moments_cmd, o, false);
  auto* analyze_cmd = app.add_subcommand("analyze", "ensemble statistics against predictions");
  analyze_cmd->add_option("--config", o.config, "experiment JSON")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--from", from, "directory written by simulate")->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--out", o.out, "output directory");
  analyze_cmd->add_option("--seed", o.seed, "base seed (overrides the config)");
  analyze_cmd->add_option("--runs", o.runs, "number of runs (overrides the config)");
  analyze_cmd->add_option("--simulator", o.simulator, "ssa or agents")->check(CLI::IsMember({"ssa", "agents"}));
  analyze_cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  auto* reproduce_cmd = app.add_subcommand("reproduce", "rerun a published experiment");
  reproduce_cmd->add_option("experiment", which, "example1 or example2")
      ->required()
      ->check(CLI::IsMember({"example1", "example2"}));
  reproduce_cmd->add_option("--seed", o.seed, "base seed");
  reproduce_cmd->add_option("--runs", o.runs, "runs per configuration");
  reproduce_cmd->add_option("--out", o.out, "output directory");
  reproduce_cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*validate_cmd) return cmd_validate(o, out);
    if (*design_cmd) return cmd_design(o, out);
    if (*simulate_cmd) return cmd_simulate(o, out);
    if (*moments_cmd) {
      const ExperimentConfig c = load_config(o.config);
      const fs::path dir = out_dir(o, c.name.empty() ? "moments" : c.name);
      append_log(dir, "moments " + o.config);
      out << "wrote " << (dir / "moments.csv").string() << '\n';
      return cmd_moments(c, resolve_model(c).params, dir);
    }
    if (*analyze_cmd) return cmd_analyze(o, from, out);
    if (*reproduce_cmd) return cmd_reproduce(which, o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace stochalloc::tools
