#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "compacta/cli.hpp"
#include "compacta/config.hpp"
#include "compacta/errors.hpp"

using namespace compacta;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) { return std::string(COMPACTA_CONFIG_DIR) + "/" + name; }

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("compacta_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::vector<std::string> column(const std::string& csv, std::size_t index) {
  std::vector<std::string> col;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(row, cell, ',');
    col.push_back(cell);
  }
  return col;
}

}  // namespace

TEST(Config, RoundTrip) {
  const RunConfig a = load_config(config_path("sweep_l0.json"));
  const RunConfig b = parse_config(serialize_config(a));
  EXPECT_TRUE(a == b);
  EXPECT_EQ(serialize_config(a), serialize_config(b));
  ASSERT_TRUE(b.sweep.has_value());
  EXPECT_EQ(b.sweep->count, 16u);
}

TEST(Config, RejectsUnknownKey) {
  nlohmann::json j = nlohmann::json::parse(slurp(config_path("base.json")));
  j["cell"]["k"] = 2;
  try {
    parse_config(j.dump());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "cell.k");
  }
}

TEST(Config, MaterialFieldPath) {
  nlohmann::json j = nlohmann::json::parse(slurp(config_path("base.json")));
  j["materials"]["rho_f"] = -1.0;
  try {
    parse_config(j.dump());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field().rfind("materials.", 0), 0u);
  }
}

TEST(Config, WithParameter) {
  const RunConfig base = load_config(config_path("base.json"));
  EXPECT_DOUBLE_EQ(with_parameter(base, "l0", 3.0).cell.l0, 3.0);
  EXPECT_DOUBLE_EQ(with_parameter(base, "g", 0.3).cell.g, 0.3);
  EXPECT_THROW(with_parameter(base, "nope", 1.0), ValidationError);
}

TEST(Cli, CoeffsReportsBothBackends) {
  const CliRun r = run({"coeffs", "--config", config_path("base.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"alpha0\": 3232.0"), std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["backends"].contains("paper"));
  EXPECT_TRUE(j["backends"].contains("first-principles"));
  EXPECT_FALSE(j["discrepancy"].empty());
}

TEST(Cli, SimulateIsDeterministic) {
  TempDir a, b;
  ASSERT_EQ(run({"simulate", "--config", config_path("base.json"), "--out", a.str()}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", config_path("base.json"), "--out", b.str()}).code, 0);
  const std::string csv = slurp(a.path() / "trajectory.csv");
  EXPECT_EQ(csv, slurp(b.path() / "trajectory.csv"));
  EXPECT_EQ(csv.rfind("t,Q0,Q0dot,Q1,P,phase\n", 0), 0u);
  const auto s = nlohmann::json::parse(slurp(a.path() / "summary.json"));
  EXPECT_EQ(s["regime"], "overdamped");
  EXPECT_NEAR(s["q0_infinity"].get<double>(), 0.01, 1e-15);
  EXPECT_LE(s["oracle_max_gap"].get<double>(), 1e-9);
  EXPECT_EQ(s["sample_count"], 2000);
}

TEST(Cli, QuiescentSimulationStaysAtRest) {
  TempDir d;
  ASSERT_EQ(run({"simulate", "--config", config_path("quiescent.json"), "--out", d.str()}).code, 0);
  for (const std::string& v : column(slurp(d.path() / "trajectory.csv"), 1)) EXPECT_EQ(std::stod(v), 0.0);
}

TEST(Cli, OscillatorySimulationCrosses) {
  TempDir d;
  const CliRun r = run({"simulate", "--config", config_path("oscillatory.json"), "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = nlohmann::json::parse(slurp(d.path() / "summary.json"));
  EXPECT_EQ(s["regime"], "oscillatory");
  EXPECT_GE(s["zero_crossings"].get<int>(), 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"classify", "--config", config_path("invalid_split.json")}).code, 2);
  EXPECT_EQ(run({"classify", "--config", config_path("missing.json")}).code, 2);
  EXPECT_EQ(run({"coeffs", "--config", config_path("base.json"), "--backend", "other"}).code, 2);
  EXPECT_EQ(run({"audit", "--config", config_path("critical.json")}).code, 5);
  EXPECT_EQ(run({"limit", "--config", config_path("limit_single.json")}).code, 2);
  EXPECT_EQ(run({"limit", "--config", config_path("limit_oscillatory.json")}).code, 2);
  EXPECT_NE(run({"frobnicate"}).code, 0);
}

TEST(Cli, ClassifyCritical) {
  const CliRun r = run({"classify", "--config", config_path("critical.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["regime"], "critical");
  EXPECT_NEAR(j["critical_length"]["bisection"].get<double>(), j["critical_length"]["closed_form"].get<double>(),
              1e-9 * 3.5);
}

TEST(Cli, SweepFindsOneTransition) {
  TempDir d;
  const CliRun r = run({"sweep", "--config", config_path("sweep_l0.json"), "--out", d.str(), "--jobs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["points"], 16);
  ASSERT_EQ(j["regime_transitions"], 1);

  const std::string csv = slurp(d.path() / "sweep.csv");
  const std::vector<std::string> value = column(csv, 1), regime = column(csv, 3);
  ASSERT_EQ(value.size(), 16u);
  for (std::size_t i = 1; i < regime.size(); ++i) {
    if (regime[i] != regime[i - 1]) {
      EXPECT_LT(std::stod(value[i - 1]), 3.49874);
      EXPECT_GT(std::stod(value[i]), 3.49874);
    }
  }

  TempDir e;
  ASSERT_EQ(run({"sweep", "--config", config_path("sweep_l0.json"), "--out", e.str(), "--jobs", "1"}).code, 0);
  EXPECT_EQ(csv, slurp(e.path() / "sweep.csv"));
}

TEST(Cli, SweepSinglePointRejected) {
  TempDir d;
  EXPECT_EQ(run({"sweep", "--config", config_path("sweep_single.json"), "--out", d.str()}).code, 2);
  EXPECT_FALSE(fs::exists(d.path() / "sweep.csv"));
}

TEST(Config, MissingBlock) {
  try {
    parse_config(R"({"cell": {"l0": 1, "g": 0.5, "h": 0.25}})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "materials");
  }
}

TEST(Cli, LimitOrder) {
  TempDir d;
  const CliRun r = run({"limit", "--config", config_path("limit.json"), "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(d.path() / "limit_summary.json"));
  EXPECT_NEAR(j["root_gap_order"].get<double>(), 2.0, 0.3);
  EXPECT_NEAR(j["supnorm_gap_order"].get<double>(), 2.0, 0.3);
  EXPECT_EQ(column(slurp(d.path() / "limit.csv"), 0).size(), 4u);
}

TEST(Cli, AuditReportsDefects) {
  const CliRun r = run({"audit", "--config", config_path("base.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["derived_defects"]["value_jump_at_t0"].get<double>(), 1e-14);
  EXPECT_GT(j["reference_defects"]["value_jump_at_t0"].get<double>(), 1e-6);
}
