#include "compacta/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "compacta/errors.hpp"

namespace compacta {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& block, const std::string& path, const std::set<std::string>& allowed) {
  if (!block.is_object()) throw ValidationError("must be an object", path);
  for (const auto& [key, value] : block.items()) {
    if (!allowed.contains(key)) {
      throw ValidationError("unknown key", join(path, key));
    }
  }
}

const json& require(const json& block, const std::string& path, const std::string& key) {
  if (!block.contains(key)) throw ValidationError("missing required key", join(path, key));
  return block.at(key);
}

double number(const json& block, const std::string& path, const std::string& key) {
  const json& v = require(block, path, key);
  if (!v.is_number()) throw ValidationError("must be a number", path + "." + key);
  return v.get<double>();
}

double number_or(const json& block, const std::string& path, const std::string& key, double fallback) {
  return block.contains(key) ? number(block, path, key) : fallback;
}

std::string string_or(const json& block, const std::string& path, const std::string& key,
                      const std::string& fallback) {
  if (!block.contains(key)) return fallback;
  if (!block.at(key).is_string()) throw ValidationError("must be a string", path + "." + key);
  return block.at(key).get<std::string>();
}

std::size_t count_of(const json& block, const std::string& path, const std::string& key,
                     std::size_t fallback) {
  if (!block.contains(key)) return fallback;
  const json& v = block.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ValidationError("must be a non-negative integer", path + "." + key);
  }
  return v.get<std::size_t>();
}

// Prefixes the block path onto errors raised by the domain validators.
template <typename F>
void with_prefix(const std::string& prefix, F&& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    const std::string field = e.field();
    if (field.empty() || field.find('.') != std::string::npos) throw;
    const std::string what = e.what();
    throw ValidationError(what.substr(field.size() + 2), prefix + "." + field);
  }
}

const std::set<std::string> kMaterialKeys{"rho_s",      "rho_f",      "lambda_s",  "mu_s",
                                          "mu_tilde_s", "mu_tilde_f", "body_force"};

double* material_slot(MaterialParams& m, const std::string& name) {
  if (name == "rho_s") return &m.rho_s;
  if (name == "rho_f") return &m.rho_f;
  if (name == "lambda_s") return &m.lambda_s;
  if (name == "mu_s") return &m.mu_s;
  if (name == "mu_tilde_s") return &m.visc_s;
  if (name == "mu_tilde_f") return &m.visc_f;
  return nullptr;
}

}  // namespace

void SweepSpec::validate() const {
  static const std::set<std::string> names{"l0",   "g",         "h",          "rho_s",     "rho_f",
                                           "lambda_s", "mu_s", "mu_tilde_s", "mu_tilde_f"};
  if (!names.contains(parameter)) throw ValidationError("unknown sweep parameter '" + parameter + "'", "sweep.parameter");
  if (count < 2) throw ValidationError("must be at least 2", "sweep.count");
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw ValidationError("must satisfy min < max", "sweep.max");
  }
  if (scale == GridScale::Log && !(min > 0.0)) throw ValidationError("log grid needs min > 0", "sweep.min");
}

std::vector<double> SweepSpec::grid() const {
  validate();
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    if (scale == GridScale::Log) {
      out[i] = std::exp(std::log(min) + s * (std::log(max) - std::log(min)));
    } else {
      out[i] = min + s * (max - min);
    }
  }
  out.front() = min;
  out.back() = max;
  return out;
}

void RunConfig::validate() const {
  with_prefix("materials", [&] { materials.validate(); });
  cell.validate();
  scenario.validate();
  if (!(numerics.oracle_tolerance >= 1e-12) || !std::isfinite(numerics.oracle_tolerance)) {
    throw ValidationError("must be at least 1e-12", "numerics.oracle_tolerance");
  }
  if (numerics.sample_count < 2) throw ValidationError("must be at least 2", "numerics.sample_count");
  if (!(numerics.critical_band >= 0.0) || !std::isfinite(numerics.critical_band)) {
    throw ValidationError("must be non-negative", "numerics.critical_band");
  }
  if (sweep) sweep->validate();
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "config");
  }
  reject_unknown(root, "", {"materials", "cell", "scenario", "numerics", "output", "sweep", "limit"});

  RunConfig c;
  const json& mat = require(root, "", "materials");
  reject_unknown(mat, "materials", kMaterialKeys);
  c.materials.rho_s = number(mat, "materials", "rho_s");
  c.materials.rho_f = number(mat, "materials", "rho_f");
  c.materials.lambda_s = number(mat, "materials", "lambda_s");
  c.materials.mu_s = number(mat, "materials", "mu_s");
  c.materials.visc_s = number(mat, "materials", "mu_tilde_s");
  c.materials.visc_f = number(mat, "materials", "mu_tilde_f");
  if (mat.contains("body_force")) {
    const json& b = mat.at("body_force");
    if (!b.is_array() || b.size() != 3) throw ValidationError("must be an array of 3 numbers", "materials.body_force");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!b[i].is_number()) throw ValidationError("must be an array of 3 numbers", "materials.body_force");
      c.materials.body_force[i] = b[i].get<double>();
    }
  }

  const json& cell = require(root, "", "cell");
  reject_unknown(cell, "cell", {"l0", "g", "h"});
  c.cell.l0 = number(cell, "cell", "l0");
  c.cell.g = number(cell, "cell", "g");
  c.cell.h = number(cell, "cell", "h");

  const json& sc = require(root, "", "scenario");
  reject_unknown(sc, "scenario", {"eta", "t0", "t_f", "L1", "L2", "L3"});
  c.scenario.eta = number(sc, "scenario", "eta");
  c.scenario.t0 = number(sc, "scenario", "t0");
  c.scenario.t_f = number(sc, "scenario", "t_f");
  c.scenario.L1 = number_or(sc, "scenario", "L1", c.scenario.L1);
  c.scenario.L2 = number_or(sc, "scenario", "L2", c.scenario.L2);
  c.scenario.L3 = number_or(sc, "scenario", "L3", c.scenario.L3);

  if (root.contains("numerics")) {
    const json& num = root.at("numerics");
    reject_unknown(num, "numerics", {"oracle_tolerance", "sample_count", "backend", "critical_band"});
    c.numerics.oracle_tolerance = number_or(num, "numerics", "oracle_tolerance", c.numerics.oracle_tolerance);
    c.numerics.sample_count = count_of(num, "numerics", "sample_count", c.numerics.sample_count);
    c.numerics.critical_band = number_or(num, "numerics", "critical_band", c.numerics.critical_band);
    c.numerics.backend = parse_backend(string_or(num, "numerics", "backend", "paper"));
  }

  if (root.contains("output")) {
    const json& out = root.at("output");
    reject_unknown(out, "output", {"dir", "trajectory_csv", "summary_json", "sweep_csv", "limit_csv"});
    c.output.dir = string_or(out, "output", "dir", c.output.dir);
    c.output.trajectory_csv = string_or(out, "output", "trajectory_csv", c.output.trajectory_csv);
    c.output.summary_json = string_or(out, "output", "summary_json", c.output.summary_json);
    c.output.sweep_csv = string_or(out, "output", "sweep_csv", c.output.sweep_csv);
    c.output.limit_csv = string_or(out, "output", "limit_csv", c.output.limit_csv);
  }

  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    reject_unknown(sw, "sweep", {"parameter", "min", "max", "count", "scale"});
    SweepSpec s;
    s.parameter = string_or(sw, "sweep", "parameter", "");
    s.min = number(sw, "sweep", "min");
    s.max = number(sw, "sweep", "max");
    s.count = count_of(sw, "sweep", "count", 0);
    const std::string scale = string_or(sw, "sweep", "scale", "linear");
    if (scale == "linear") {
      s.scale = GridScale::Linear;
    } else if (scale == "log") {
      s.scale = GridScale::Log;
    } else {
      throw ValidationError("must be 'linear' or 'log'", "sweep.scale");
    }
    c.sweep = s;
  }

  if (root.contains("limit")) {
    const json& lim = root.at("limit");
    reject_unknown(lim, "limit", {"l0_sequence"});
    const json& seq = require(lim, "limit", "l0_sequence");
    if (!seq.is_array()) throw ValidationError("must be an array of numbers", "limit.l0_sequence");
    LimitSpec l;
    for (const json& v : seq) {
      if (!v.is_number()) throw ValidationError("must be an array of numbers", "limit.l0_sequence");
      l.l0_sequence.push_back(v.get<double>());
    }
    c.limit = l;
  }

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'", "config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  json root;
  root["materials"] = {{"rho_s", c.materials.rho_s},
                       {"rho_f", c.materials.rho_f},
                       {"lambda_s", c.materials.lambda_s},
                       {"mu_s", c.materials.mu_s},
                       {"mu_tilde_s", c.materials.visc_s},
                       {"mu_tilde_f", c.materials.visc_f},
                       {"body_force", {c.materials.body_force[0], c.materials.body_force[1], c.materials.body_force[2]}}};
  root["cell"] = {{"l0", c.cell.l0}, {"g", c.cell.g}, {"h", c.cell.h}};
  root["scenario"] = {{"eta", c.scenario.eta}, {"t0", c.scenario.t0}, {"t_f", c.scenario.t_f},
                      {"L1", c.scenario.L1},   {"L2", c.scenario.L2}, {"L3", c.scenario.L3}};
  root["numerics"] = {{"oracle_tolerance", c.numerics.oracle_tolerance},
                      {"sample_count", c.numerics.sample_count},
                      {"backend", std::string(to_string(c.numerics.backend))},
                      {"critical_band", c.numerics.critical_band}};
  root["output"] = {{"dir", c.output.dir},
                    {"trajectory_csv", c.output.trajectory_csv},
                    {"summary_json", c.output.summary_json},
                    {"sweep_csv", c.output.sweep_csv},
                    {"limit_csv", c.output.limit_csv}};
  if (c.sweep) {
    root["sweep"] = {{"parameter", c.sweep->parameter},
                     {"min", c.sweep->min},
                     {"max", c.sweep->max},
                     {"count", c.sweep->count},
                     {"scale", c.sweep->scale == GridScale::Log ? "log" : "linear"}};
  }
  if (c.limit) root["limit"] = {{"l0_sequence", c.limit->l0_sequence}};
  return root.dump(2) + "\n";
}

RunConfig with_parameter(const RunConfig& config, const std::string& name, double value) {
  RunConfig out = config;
  if (name == "l0") {
    out.cell.l0 = value;
  } else if (name == "g") {
    out.cell.g = value;
  } else if (name == "h") {
    out.cell.h = value;
  } else if (double* slot = material_slot(out.materials, name)) {
    *slot = value;
  } else {
    throw ValidationError("unknown parameter '" + name + "'", "sweep.parameter");
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

}  // namespace compacta
