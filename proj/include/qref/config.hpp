#ifndef QREF_CONFIG_HPP
#define QREF_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qref/errors.hpp"
#include "qref/mpemba.hpp"
#include "qref/params.hpp"

namespace qref {

using json = nlohmann::json;

// One sweep axis: which parameter moves, over which range, on which scale.
// kappa_hw ties the hot and work couplings together; kappa_all ties all three.
struct AxisSpec {
  std::string param;  // g, kappa_c, kappa_h, kappa_w, kappa_hw, kappa_all
  double min = 0.0;
  double max = 0.0;
  int points = 1;
  bool log = false;
};

struct ExperimentConfig {
  int schema_version = 1;
  RefrigeratorParams model;
  std::uint64_t seed = 12345;
  int threads = 0;  // 0 = hardware concurrency
  UnitaryFamily family = UnitaryFamily::global;
  double epsilon = 1e-5;  // steady-state threshold on the trace distance
  int grid_points = 400;  // log-grid samples after the t = 0 anchor
  double grid_lo = 0.1;   // window in units of 1/|Re lambda_2|
  double grid_hi = 20.0;
  OptimizerConfig optimizer;
  std::optional<AxisSpec> axis1, axis2;
  std::string output_dir;  // empty = resolve via flag, then environment, then cwd
};

namespace detail {

inline void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                        const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read_into(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where);
  }
}

inline AxisSpec parse_axis(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  expect_keys(j, {"param", "min", "max", "points", "scale"}, where);
  AxisSpec a;
  read_into(j, "param", a.param, where);
  read_into(j, "min", a.min, where);
  read_into(j, "max", a.max, where);
  read_into(j, "points", a.points, where);
  std::string scale = "linear";
  read_into(j, "scale", scale, where);
  if (scale == "log")
    a.log = true;
  else if (scale != "linear")
    throw ConfigError(where + ": scale must be 'linear' or 'log'");
  static const char* known[] = {"g", "kappa_c", "kappa_h", "kappa_w", "kappa_hw", "kappa_all"};
  bool ok = false;
  for (const char* k : known)
    if (a.param == k) ok = true;
  if (!ok) throw ConfigError(where + ": unknown sweep parameter '" + a.param + "'");
  if (a.points < 1) throw ConfigError(where + ": points must be >= 1");
  if (!(a.max >= a.min)) throw ConfigError(where + ": max must be >= min");
  if (a.log && !(a.min > 0.0)) throw ConfigError(where + ": log scale needs min > 0");
  return a;
}

inline json axis_to_json(const AxisSpec& a) {
  return {{"param", a.param}, {"min", a.min},  {"max", a.max},
          {"points", a.points}, {"scale", a.log ? "log" : "linear"}};
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("top-level config must be a JSON object");
  detail::expect_keys(j,
                      {"schema_version", "model", "seed", "threads", "family", "epsilon",
                       "time_grid", "optimizer", "sweep", "output_dir"},
                      "config");
  ExperimentConfig c;
  detail::read_into(j, "schema_version", c.schema_version, "config");
  if (c.schema_version != 1) throw ConfigError("unsupported schema_version (expected 1)");
  if (j.contains("model")) {
    const json& m = j.at("model");
    detail::expect_keys(
        m, {"E0", "E1", "g", "Tc", "Th", "Tw", "kappa_c", "kappa_h", "kappa_w", "cutoff"},
        "model");
    detail::read_into(m, "E0", c.model.E0, "model");
    detail::read_into(m, "E1", c.model.E1, "model");
    detail::read_into(m, "g", c.model.g, "model");
    detail::read_into(m, "Tc", c.model.Tc, "model");
    detail::read_into(m, "Th", c.model.Th, "model");
    detail::read_into(m, "Tw", c.model.Tw, "model");
    detail::read_into(m, "kappa_c", c.model.kappa_c, "model");
    detail::read_into(m, "kappa_h", c.model.kappa_h, "model");
    detail::read_into(m, "kappa_w", c.model.kappa_w, "model");
    detail::read_into(m, "cutoff", c.model.cutoff, "model");
  }
  detail::read_into(j, "seed", c.seed, "config");
  detail::read_into(j, "threads", c.threads, "config");
  if (j.contains("family")) c.family = family_from_name(j.at("family").get<std::string>());
  detail::read_into(j, "epsilon", c.epsilon, "config");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (j.contains("time_grid")) {
    const json& t = j.at("time_grid");
    detail::expect_keys(t, {"points", "lo", "hi"}, "time_grid");
    detail::read_into(t, "points", c.grid_points, "time_grid");
    detail::read_into(t, "lo", c.grid_lo, "time_grid");
    detail::read_into(t, "hi", c.grid_hi, "time_grid");
    if (c.grid_points < 2) throw ConfigError("time_grid points must be >= 2");
    if (!(c.grid_hi > c.grid_lo) || !(c.grid_lo > 0.0))
      throw ConfigError("time_grid needs hi > lo > 0");
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    detail::expect_keys(o,
                        {"starts", "evals_per_stage", "penalty_stages", "penalty_weight0",
                         "penalty_growth", "simplex_step", "step_shrink", "init_scale",
                         "residual_bound"},
                        "optimizer");
    detail::read_into(o, "starts", c.optimizer.starts, "optimizer");
    detail::read_into(o, "evals_per_stage", c.optimizer.evals_per_stage, "optimizer");
    detail::read_into(o, "penalty_stages", c.optimizer.penalty_stages, "optimizer");
    detail::read_into(o, "penalty_weight0", c.optimizer.penalty_weight0, "optimizer");
    detail::read_into(o, "penalty_growth", c.optimizer.penalty_growth, "optimizer");
    detail::read_into(o, "simplex_step", c.optimizer.simplex_step, "optimizer");
    detail::read_into(o, "step_shrink", c.optimizer.step_shrink, "optimizer");
    detail::read_into(o, "init_scale", c.optimizer.init_scale, "optimizer");
    detail::read_into(o, "residual_bound", c.optimizer.residual_bound, "optimizer");
    if (c.optimizer.starts < 1) throw ConfigError("optimizer starts must be >= 1");
    if (c.optimizer.evals_per_stage < 10) throw ConfigError("optimizer evals_per_stage too small");
    if (c.optimizer.penalty_stages < 1) throw ConfigError("optimizer penalty_stages must be >= 1");
    if (!(c.optimizer.penalty_growth > 1.0)) throw ConfigError("penalty_growth must be > 1");
    if (!(c.optimizer.residual_bound > 0.0)) throw ConfigError("residual_bound must be > 0");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    detail::expect_keys(s, {"axis1", "axis2"}, "sweep");
    if (s.contains("axis1")) c.axis1 = detail::parse_axis(s.at("axis1"), "sweep.axis1");
    if (s.contains("axis2")) c.axis2 = detail::parse_axis(s.at("axis2"), "sweep.axis2");
    if (c.axis2 && !c.axis1) throw ConfigError("sweep.axis2 given without sweep.axis1");
  }
  detail::read_into(j, "output_dir", c.output_dir, "config");
  validate(c.model);
  return c;
}

// Canonical serialization: every field explicit, keys sorted by the JSON
// library, so parse -> serialize is the identity on round trips.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["model"] = {{"E0", c.model.E0},     {"E1", c.model.E1},
                {"g", c.model.g},       {"Tc", c.model.Tc},
                {"Th", c.model.Th},     {"Tw", c.model.Tw},
                {"kappa_c", c.model.kappa_c}, {"kappa_h", c.model.kappa_h},
                {"kappa_w", c.model.kappa_w}, {"cutoff", c.model.cutoff}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["family"] = family_name(c.family);
  j["epsilon"] = c.epsilon;
  j["time_grid"] = {{"points", c.grid_points}, {"lo", c.grid_lo}, {"hi", c.grid_hi}};
  j["optimizer"] = {{"starts", c.optimizer.starts},
                    {"evals_per_stage", c.optimizer.evals_per_stage},
                    {"penalty_stages", c.optimizer.penalty_stages},
                    {"penalty_weight0", c.optimizer.penalty_weight0},
                    {"penalty_growth", c.optimizer.penalty_growth},
                    {"simplex_step", c.optimizer.simplex_step},
                    {"step_shrink", c.optimizer.step_shrink},
                    {"init_scale", c.optimizer.init_scale},
                    {"residual_bound", c.optimizer.residual_bound}};
  if (c.axis1 || c.axis2) {
    json s = json::object();
    if (c.axis1) s["axis1"] = detail::axis_to_json(*c.axis1);
    if (c.axis2) s["axis2"] = detail::axis_to_json(*c.axis2);
    j["sweep"] = s;
  }
  j["output_dir"] = c.output_dir;
  return j;
}

inline std::vector<double> axis_values(const AxisSpec& a) {
  std::vector<double> v;
  v.reserve(a.points);
  if (a.points == 1) {
    v.push_back(a.min);
    return v;
  }
  for (int k = 0; k < a.points; ++k) {
    const double f = static_cast<double>(k) / (a.points - 1);
    v.push_back(a.log ? a.min * std::pow(a.max / a.min, f) : a.min + (a.max - a.min) * f);
  }
  return v;
}

inline void apply_axis(RefrigeratorParams& p, const std::string& param, double value) {
  if (param == "g")
    p.g = value;
  else if (param == "kappa_c")
    p.kappa_c = value;
  else if (param == "kappa_h")
    p.kappa_h = value;
  else if (param == "kappa_w")
    p.kappa_w = value;
  else if (param == "kappa_hw")
    p.kappa_h = p.kappa_w = value;
  else if (param == "kappa_all")
    p.kappa_c = p.kappa_h = p.kappa_w = value;
  else
    throw ConfigError("unknown sweep parameter '" + param + "'");
}

// Output directory priority: explicit flag, then config, then QREF_OUT_DIR, then cwd.
inline std::string resolve_output_dir(const std::optional<std::string>& flag,
                                      const std::string& config_value, const char* env_value) {
  if (flag && !flag->empty()) return *flag;
  if (!config_value.empty()) return config_value;
  if (env_value && env_value[0]) return env_value;
  return ".";
}

}  // namespace qref

#endif
