#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stochalloc/config.hpp"
#include "stochalloc/ensemble_stats.hpp"
#include "stochalloc/gillespie.hpp"
#include "stochalloc/moment_dynamics.hpp"

namespace stochalloc::tools {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Hash of the graph, rates, beta and coupling in canonical JSON form.
std::string params_hash(const RateParams& params);

/// `time,from,to` with %.17g times and 1-based tasks, plus a JSON sidecar
/// (seed, params hash, x0, t_end) next to it with the extension .json.
void write_trace(const Trace& trace, const RateParams& params, const std::filesystem::path& csv);
/// Reads a trace written by write_trace. Throws kParseError.
Trace read_trace(const std::filesystem::path& csv);

/// `t,m1..mM,S11,S12,..,SMM` (upper triangle, row-major).
void write_moments(const std::vector<MomentSample>& samples, const std::filesystem::path& csv);

/// One row per (label, task) with mean, variance, RV and standard error.
void write_stats(const std::vector<std::pair<std::string, SummaryStats>>& stats,
                 const std::filesystem::path& csv);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Appends a time-stamped line; the only non-deterministic artifact.
void append_log(const std::filesystem::path& dir, const std::string& line);

}  // namespace stochalloc::tools
