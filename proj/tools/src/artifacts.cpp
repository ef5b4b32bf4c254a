#include "stochalloc/tools/artifacts.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stochalloc/error.hpp"

namespace stochalloc::tools {
namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kValidationError, "cannot write " + path.string());
  return out;
}

[[noreturn]] void bad_trace(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kParseError, path.string() + ": " + what);
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string params_hash(const RateParams& params) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : params.graph().edges()) edges.push_back({e.a + 1, e.b + 1});
  std::vector<std::string> rates;
  for (double r : params.rates()) rates.push_back(g17(r));
  std::vector<std::string> beta;
  for (double b : params.beta()) beta.push_back(g17(b));
  const nlohmann::json canonical = {
      {"tasks", params.task_count()},
      {"edges", edges},
      {"rates", rates},
      {"beta", beta},
      {"coupling", params.coupling() == BetaCoupling::kSymmetric ? "symmetric" : "departure"}};
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(canonical.dump()));
  return buf;
}

void write_trace(const Trace& trace, const RateParams& params, const std::filesystem::path& csv) {
  {
    auto out = open_out(csv);
    out << "time,from,to\n";
    for (const auto& e : trace.events) out << g17(e.time) << ',' << e.from + 1 << ',' << e.to + 1 << '\n';
  }
  auto side = csv;
  side.replace_extension(".json");
  const nlohmann::json header = {{"seed", trace.seed},
                                 {"params_hash", params_hash(params)},
                                 {"x0", trace.initial.counts},
                                 {"t_end", trace.t_end}};
  open_out(side) << header.dump(2) << '\n';
}

Trace read_trace(const std::filesystem::path& csv) {
  auto side = csv;
  side.replace_extension(".json");
  std::ifstream hin(side);
  if (!hin) bad_trace(side, "missing sidecar");
  Trace trace;
  try {
    const auto header = nlohmann::json::parse(hin);
    trace.seed = header.at("seed").get<std::uint64_t>();
    trace.initial.counts = header.at("x0").get<std::vector<int>>();
    trace.t_end = header.at("t_end").get<double>();
  } catch (const nlohmann::json::exception& e) {
    bad_trace(side, e.what());
  }

  std::ifstream in(csv);
  if (!in) bad_trace(csv, "cannot open");
  std::string line;
  if (!std::getline(in, line) || line != "time,from,to") bad_trace(csv, "expected header time,from,to");
  const std::size_t m = trace.initial.size();
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double t = 0.0;
    long from = 0;
    long to = 0;
    char c1 = 0;
    char c2 = 0;
    if (!(row >> t >> c1 >> from >> c2 >> to) || c1 != ',' || c2 != ',' || from < 1 || to < 1 ||
        static_cast<std::size_t>(from) > m || static_cast<std::size_t>(to) > m) {
      bad_trace(csv, "malformed row at line " + std::to_string(lineno));
    }
    trace.events.push_back({t, static_cast<TaskId>(from - 1), static_cast<TaskId>(to - 1)});
  }
  return trace;
}

void write_moments(const std::vector<MomentSample>& samples, const std::filesystem::path& csv) {
  auto out = open_out(csv);
  const Eigen::Index m = samples.empty() ? 0 : samples.front().state.mean.size();
  out << 't';
  for (Eigen::Index i = 0; i < m; ++i) out << ",m" << i + 1;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) out << ",S" << i + 1 << '_' << j + 1;
  }
  out << '\n';
  for (const auto& s : samples) {
    out << g17(s.t);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << g17(s.state.mean(i));
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) out << ',' << g17(s.state.second(i, j));
    }
    out << '\n';
  }
}

void write_stats(const std::vector<std::pair<std::string, SummaryStats>>& stats,
                 const std::filesystem::path& csv) {
  auto out = open_out(csv);
  out << "label,task,mean,variance,rv,rv_undefined,standard_error,n_samples,n_runs,burn_in\n";
  for (const auto& [label, s] : stats) {
    for (Eigen::Index i = 0; i < s.mean.size(); ++i) {
      out << label << ',' << i + 1 << ',' << g17(s.mean(i)) << ',' << g17(s.variance(i)) << ','
          << g17(s.rv(i)) << ',' << (s.rv_undefined[static_cast<std::size_t>(i)] ? 1 : 0) << ','
          << g17(s.standard_error(i)) << ',' << s.n_samples << ',' << s.n_runs << ',' << g17(s.burn_in)
          << '\n';
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) { open_out(path) << text; }

void append_log(const std::filesystem::path& dir, const std::string& line) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  out << stamp << ' ' << line << '\n';
}

}  // namespace stochalloc::tools
