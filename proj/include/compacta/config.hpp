#pragma once

// JSON run configuration. All units SI. Unknown keys are rejected and every
// physical invariant is re-validated at load; errors carry the field path.
//
// {
//   "materials": {"rho_s", "rho_f", "lambda_s", "mu_s", "mu_tilde_s", "mu_tilde_f",
//                 "body_force": [0, 0, 0]},
//   "cell":      {"l0", "g", "h"},
//   "scenario":  {"eta", "t0", "t_f", "L1", "L2", "L3"},
//   "numerics":  {"oracle_tolerance", "sample_count", "backend", "critical_band"},
//   "output":    {"dir", "trajectory_csv", "summary_json", "sweep_csv", "limit_csv"},
//   "sweep":     {"parameter", "min", "max", "count", "scale": "linear" | "log"},
//   "limit":     {"l0_sequence": [...]}
// }
//
// materials, cell and scenario are required; the other blocks are optional.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "compacta/coefficients.hpp"
#include "compacta/dynamics.hpp"

namespace compacta {

struct NumericsConfig {
  double oracle_tolerance = 1e-9;
  std::size_t sample_count = 2000;
  Backend backend = Backend::Formula;
  double critical_band = 1e-9;
};

struct OutputConfig {
  std::string dir = ".";
  std::string trajectory_csv = "trajectory.csv";
  std::string summary_json = "summary.json";
  std::string sweep_csv = "sweep.csv";
  std::string limit_csv = "limit.csv";
};

enum class GridScale { Linear, Log };

struct SweepSpec {
  std::string parameter;  // l0, g, h, or a material key
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  GridScale scale = GridScale::Linear;

  void validate() const;
  std::vector<double> grid() const;
};

struct LimitSpec {
  std::vector<double> l0_sequence;
};

struct RunConfig {
  MaterialParams materials;
  CubicSpec cell;
  SettlingScenario scenario;
  NumericsConfig numerics;
  OutputConfig output;
  std::optional<SweepSpec> sweep;
  std::optional<LimitSpec> limit;

  void validate() const;
};

// Throws ValidationError (with the offending field path) on malformed input.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

// Config with one swept parameter replaced; throws ValidationError on an
// unknown name.
RunConfig with_parameter(const RunConfig& config, const std::string& name, double value);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace compacta
