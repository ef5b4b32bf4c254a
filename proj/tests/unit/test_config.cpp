#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "stochalloc/config.hpp"
#include "stochalloc/error.hpp"
#include "stochalloc/experiment.hpp"

using namespace stochalloc;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(STOCHALLOC_SOURCE_DIR) / "configs";

ErrorCode parse_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("accepted: " << text);
  return ErrorCode::kParseError;
}

std::string minimal(const std::string& extra = "") {
  return R"({"graph": {"tasks": 2, "edges": [[1, 2]]}, "robots": 4, "initial": [4, 0], "desired": [2, 2])" + extra +
         "}";
}

}  // namespace

TEST_CASE("bundled Example 1") {
  const ExperimentConfig c = load_config(kConfigs / "example1.json");
  CHECK(c.tasks == 4);
  CHECK(c.edges.size() == 4);
  CHECK(c.initial == std::vector<int>{5, 15, 5, 5});
  CHECK(c.desired == std::vector<double>{13, 9, 6, 2});
  CHECK(c.beta == std::vector<double>{0.05, 0.20, 0.11, 0.052});
  CHECK_FALSE(c.rates.has_value());
  CHECK(c == example1_config());
}

TEST_CASE("bundled Example 2 percentages") {
  const ExperimentConfig c16 = load_config(kConfigs / "example2_n16.json");
  CHECK(c16.initial == std::vector<int>{4, 4, 0, 8});
  CHECK(c16.desired == std::vector<double>{8, 8, 0, 0});
  CHECK(c16 == example2_config(16, true));
  CHECK(load_config(kConfigs / "example2_n26.json").initial == std::vector<int>{7, 6, 0, 13});
  CHECK(load_config(kConfigs / "example2_n52.json") == example2_config(52, true));
}

TEST_CASE("largest remainder") {
  CHECK(largest_remainder({0.25, 0.25, 0.0, 0.5}, 26) == std::vector<int>{7, 6, 0, 13});
  CHECK(largest_remainder({1.0 / 3, 1.0 / 3, 1.0 / 3}, 10) == std::vector<int>{4, 3, 3});
  CHECK(largest_remainder({0.5, 0.5}, 0) == std::vector<int>{0, 0});
}

TEST_CASE("defaults") {
  const ExperimentConfig c = parse_config(minimal());
  CHECK(c.t_end == 20.0);
  CHECK(c.runs == 100);
  CHECK(c.samples == 130);
  CHECK(c.burn_in == 2.0);
  CHECK(c.seed == 1);
  CHECK(c.simulator == SimulatorKind::kSsa);
  CHECK(c.coupling == BetaCoupling::kSymmetric);
  CHECK(c.beta_vector().isZero());
  CHECK(std::isinf(c.design.r_max));
  CHECK(c.keep_positive);
}

TEST_CASE("round trip") {
  ExperimentConfig c = parse_config(minimal(R"(, "rates": [{"from": 1, "to": 2, "rate": 0.1}], "beta": [0.3, 0.1],
      "beta_coupling": "departure", "simulator": "agents", "seed": 18446744073709551615,
      "design": {"diag_min": 0.7, "r_max": 3.25, "keep_positive": false}, "dt": 0.0001)"));
  CHECK_FALSE(c.keep_positive);
  const fs::path tmp = fs::temp_directory_path() / "stochalloc_roundtrip" / "c.json";
  write_config(c, tmp);
  CHECK(load_config(tmp) == c);
  for (const char* name : {"example1.json", "example1_printed_gains.json", "example2_n16.json"}) {
    const ExperimentConfig b = load_config(kConfigs / name);
    write_config(b, tmp);
    CHECK(load_config(tmp) == b);
  }
  fs::remove_all(tmp.parent_path());
}

TEST_CASE("positivity floor follows keep_positive") {
  ExperimentConfig c = example1_config();
  const Eigen::VectorXd xd = c.desired_vector();
  CHECK(positivity_margin(resolve_model(c).params, xd) >= -1e-12);
  CHECK(design_constraints(c).rate_floor.size() == 8);
  c.keep_positive = false;
  CHECK(design_constraints(c).rate_floor.empty());
  CHECK(positivity_margin(resolve_model(c).params, xd) < 0.0);
}

TEST_CASE("validation errors") {
  CHECK(parse_code(R"({"graph": {"tasks": 2, "edges": [[1, 2]]}, "robots": 4, "initial": [3, 0], "desired": [2, 2]})") ==
        ErrorCode::kValidationError);
  CHECK(parse_code(R"({"graph": {"tasks": 2, "edges": [[1, 2]]}, "robots": 4, "initial": [4, 0], "desired": [2, 3]})") ==
        ErrorCode::kValidationError);
  CHECK(parse_code(minimal(R"(, "runs": 0)")) == ErrorCode::kValidationError);
  CHECK(parse_code(minimal(R"(, "burn_in": 30)")) == ErrorCode::kValidationError);
  CHECK(parse_code(minimal(R"(, "beta": [0.1])")) == ErrorCode::kValidationError);
  CHECK(parse_code(R"({"graph": {"tasks": 3, "edges": [[1, 2]]}, "robots": 1, "initial": [1, 0, 0], "desired": [1, 0, 0]})") ==
        ErrorCode::kValidationError);
  CHECK(parse_code(R"({"graph": {"tasks": 3, "edges": [[1, 2], [2, 3]]}, "robots": 1, "initial": [1, 0, 0],
      "desired": [1, 0, 0], "rates": [{"from": 1, "to": 3, "rate": 1}]})") == ErrorCode::kValidationError);
}

TEST_CASE("parse errors") {
  CHECK(parse_code("{\"graph\": ") == ErrorCode::kParseError);
  CHECK(parse_code(minimal(R"(, "runz": 5)")) == ErrorCode::kParseError);
  CHECK(parse_code(minimal(R"(, "t_end": "long")")) == ErrorCode::kParseError);
  CHECK(parse_code(minimal(R"(, "simulator": "euler")")) == ErrorCode::kParseError);
  CHECK(parse_code(R"({"graph": {"tasks": 2, "edges": [[0, 1]]}, "robots": 1, "initial": [1, 0], "desired": [1, 0]})") ==
        ErrorCode::kParseError);
  try {
    parse_config("{\n  \"graph\": {\n  oops\n}");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_config(minimal(R"(, "rates": [{"from": 1, "to": 2, "rate": "x"}])"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("rates[0].rate") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}
