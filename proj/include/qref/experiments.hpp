#ifndef QREF_EXPERIMENTS_HPP
#define QREF_EXPERIMENTS_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qref/config.hpp"
#include "qref/csv.hpp"
#include "qref/density.hpp"
#include "qref/dynamics.hpp"
#include "qref/liouvillian.hpp"
#include "qref/mpemba.hpp"
#include "qref/parallel.hpp"
#include "qref/spectral.hpp"

namespace qref {

namespace detail {

inline std::string path_join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

inline std::string write_summary(const std::string& dir, const std::string& command,
                                 const json& summary) {
  const std::string name = "summary_" + command + ".json";
  std::ofstream out(path_join(dir, name));
  if (!out) throw ConfigError("cannot write " + name + " in '" + dir + "'");
  out << summary.dump(2) << '\n';
  return name;
}

inline json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json lambda3_json(const SpectralDecomposition& sd) {
  const auto l3 = lambda3(sd);
  return l3 ? cplx_json(*l3) : json(nullptr);
}

inline OptimizerConfig optimizer_for(const ExperimentConfig& cfg) {
  OptimizerConfig o = cfg.optimizer;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  return o;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
  CsvWriter w(path, {"t", "distance", "qubit_temperature"});
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    w.row({csv_double(tr.times[k]), csv_double(tr.distances[k]),
           csv_double(tr.temperatures[k])});
}

}  // namespace detail

// Full eigenmode census of the generator at the configured working point.
inline json cmd_spectrum(const ExperimentConfig& cfg, const std::string& out_dir) {
  detail::ensure_output_dir(out_dir);
  const BlockLiouvillian L = assemble_block_liouvillian(cfg.model);
  const SpectralDecomposition sd = spectral_decompose(L);

  {
    CsvWriter w(detail::path_join(out_dir, "spectrum.csv"),
                {"index", "re_lambda", "im_lambda", "block", "element"});
    for (std::size_t k = 0; k < sd.modes.size(); ++k) {
      const Mode& m = sd.modes[k];
      std::string element;
      if (m.block == BlockTag::scalar)
        element = "(" + std::to_string(m.row + 1) + "," + std::to_string(m.col + 1) + ")";
      w.row({std::to_string(k), csv_double(m.lambda.real()), csv_double(m.lambda.imag()),
             block_name(m.block), element});
    }
  }

  {
    CsvWriter w(detail::path_join(out_dir, "biorthonormality.csv"), {"i", "j", "residual"});
    for (std::size_t i = 0; i < sd.modes.size(); ++i)
      for (std::size_t j = 0; j < sd.modes.size(); ++j) {
        const cplx p = (sd.modes[i].left * sd.modes[j].right).trace();
        const double res = std::abs(p - (i == j ? cplx(1.0) : cplx(0.0)));
        w.row({std::to_string(i), std::to_string(j), csv_double(res)});
      }
  }

  int n_pop = 0, n_pair = 0, n_scalar = 0;
  for (const Mode& m : sd.modes) {
    if (m.block == BlockTag::populations)
      ++n_pop;
    else if (m.block == BlockTag::scalar)
      ++n_scalar;
    else
      ++n_pair;
  }

  json summary;
  summary["command"] = "spectrum";
  summary["config"] = config_to_json(cfg);
  summary["census"] = {{"populations", n_pop},
                       {"coherence_pairs", n_pair / 2},
                       {"pair_modes", n_pair},
                       {"scalars", n_scalar},
                       {"total", n_pop + n_pair + n_scalar}};
  summary["census_line"] = "block census: " + std::to_string(n_pop) + " population modes, " +
                           std::to_string(n_pair / 2) + " coherence pairs x 2, " +
                           std::to_string(n_scalar) + " scalar modes, total " +
                           std::to_string(n_pop + n_pair + n_scalar);
  summary["lambda2"] = detail::cplx_json(lambda2(sd));
  summary["lambda3"] = detail::lambda3_json(sd);
  summary["slow_mode_count"] = static_cast<int>(slowest_mode_set(sd).size());
  summary["biortho_residual"] = sd.biortho_residual;
  summary["outputs"] = {"spectrum.csv", "biorthonormality.csv"};

  // The spectrum artifacts above are valid for any coupling choice, so they are
  // written before the ergodicity gate: a closed or disconnected configuration
  // still leaves its spectrum on disk alongside the failure summary.
  DensityMatrix tau{};
  try {
    tau = solve_steady_state(L);
  } catch (const NonErgodicError&) {
    summary["ergodic"] = false;
    summary["steady"] = nullptr;
    detail::write_summary(out_dir, "spectrum", summary);
    throw;
  }
  summary["ergodic"] = true;

  const DensityMatrix tau_p = to_product_basis(tau, sd.basis);
  const QubitTemperature qt = qubit_temperature(tau_p, cfg.model.E0);
  json pops = json::array();
  for (int k = 0; k < 6; ++k) pops.push_back(tau.mat(k, k).real());
  summary["steady"] = {{"T_s", qt.value},
                       {"inverted", qt.inverted},
                       {"virtual_temperature", virtual_temperature(cfg.model)},
                       {"populations", pops}};
  detail::write_summary(out_dir, "spectrum", summary);
  return summary;
}

// Relax the two-bath thermal product state and record the approach to the
// steady state.
inline json cmd_evolve(const ExperimentConfig& cfg, const std::string& out_dir) {
  detail::ensure_output_dir(out_dir);
  const BlockLiouvillian L = assemble_block_liouvillian(cfg.model);
  const SpectralDecomposition sd = spectral_decompose(L);
  solve_steady_state(L);  // ergodicity gate

  const DensityMatrix rho0 = thermal_product_state(cfg.model);
  const std::vector<double> grid = make_time_grid(sd, cfg.grid_points, cfg.grid_lo, cfg.grid_hi);
  const Trajectory tr = distance_trajectory(sd, rho0, grid);
  detail::write_trajectory_csv(detail::path_join(out_dir, "trajectory.csv"), tr);

  json summary;
  summary["command"] = "evolve";
  summary["config"] = config_to_json(cfg);
  summary["lambda2"] = detail::cplx_json(lambda2(sd));
  summary["lambda3"] = detail::lambda3_json(sd);
  summary["virtual_temperature"] = virtual_temperature(cfg.model);
  summary["epsilon"] = cfg.epsilon;
  summary["initial_distance"] = tr.distances.front();
  summary["final_distance"] = tr.distances.back();
  summary["initial_T_qubit"] = tr.temperatures.front();
  summary["final_T_qubit"] = tr.temperatures.back();
  try {
    summary["t_ss"] = steady_state_time(tr, cfg.epsilon);
    summary["converged"] = true;
  } catch (const ConvergenceError& e) {
    summary["t_ss"] = nullptr;
    summary["converged"] = false;
    summary["convergence_error"] = e.what();
  }
  summary["outputs"] = {"trajectory.csv"};
  detail::write_summary(out_dir, "evolve", summary);
  return summary;
}

// Steady-state cooling map over a two-parameter grid. Points that fail to
// solve leave their value fields empty and are listed in the summary.
inline json cmd_steady_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (!cfg.axis1 || !cfg.axis2)
    throw ConfigError("steady-sweep needs both sweep.axis1 and sweep.axis2");
  detail::ensure_output_dir(out_dir);
  const std::vector<double> v1 = axis_values(*cfg.axis1);
  const std::vector<double> v2 = axis_values(*cfg.axis2);
  const int n1 = static_cast<int>(v1.size()), n2 = static_cast<int>(v2.size());

  struct Point {
    double T_s = 0.0;
    bool ok = false;
    std::string error;
  };
  std::vector<Point> pts(static_cast<std::size_t>(n1) * n2);
  parallel_for(n1 * n2, cfg.threads, [&](int k) {
    const int i = k / n2, j = k % n2;
    Point& pt = pts[k];
    try {
      RefrigeratorParams p = cfg.model;
      apply_axis(p, cfg.axis1->param, v1[i]);
      apply_axis(p, cfg.axis2->param, v2[j]);
      validate(p);
      const BlockLiouvillian L = assemble_block_liouvillian(p);
      const DensityMatrix tau = solve_steady_state(L);
      const DensityMatrix tau_p = to_product_basis(tau, L.basis);
      pt.T_s = qubit_temperature(tau_p, p.E0).value;
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });

  json failures = json::array();
  {
    CsvWriter w(detail::path_join(out_dir, "steady_sweep.csv"),
                {"param1", "param2", "delta_T", "T_s"});
    for (int k = 0; k < n1 * n2; ++k) {
      const int i = k / n2, j = k % n2;
      const Point& pt = pts[k];
      if (pt.ok) {
        w.row({csv_double(v1[i]), csv_double(v2[j]), csv_double(pt.T_s - cfg.model.Tc),
               csv_double(pt.T_s)});
      } else {
        w.row({csv_double(v1[i]), csv_double(v2[j]), "", ""});
        failures.push_back({{"index", k},
                            {"param1", v1[i]},
                            {"param2", v2[j]},
                            {"error", pt.error}});
      }
    }
  }

  json summary;
  summary["command"] = "steady-sweep";
  summary["config"] = config_to_json(cfg);
  summary["axis1"] = detail::axis_to_json(*cfg.axis1);
  summary["axis2"] = detail::axis_to_json(*cfg.axis2);
  summary["n_points"] = n1 * n2;
  summary["n_failed"] = static_cast<int>(failures.size());
  summary["failures"] = failures;
  summary["outputs"] = {"steady_sweep.csv"};
  detail::write_summary(out_dir, "steady-sweep", summary);
  return summary;
}

// Search the configured unitary family for a slow-mode-free initial state and
// check that it beats the thermal reference on the way to the steady state.
inline json cmd_mpemba(const ExperimentConfig& cfg, const std::string& out_dir) {
  detail::ensure_output_dir(out_dir);
  const BlockLiouvillian L = assemble_block_liouvillian(cfg.model);
  const SpectralDecomposition sd = spectral_decompose(L);
  solve_steady_state(L);  // ergodicity gate

  const std::vector<int> slow = slowest_mode_set(sd);
  const DensityMatrix rho0 = thermal_product_state(cfg.model);
  const MpembaSolution sol =
      optimize_mpemba_state(sd, slow, rho0, cfg.family, detail::optimizer_for(cfg));

  json summary;
  summary["command"] = "mpemba";
  summary["config"] = config_to_json(cfg);
  summary["family"] = family_name(sol.family);
  summary["feasible"] = sol.feasible;
  summary["residual"] = sol.residual;
  summary["distance_gain"] = sol.distance_gain;
  summary["best_start"] = sol.best_start;
  summary["total_evals"] = sol.total_evals;
  summary["lambda2"] = detail::cplx_json(lambda2(sd));
  summary["lambda3"] = detail::lambda3_json(sd);
  json slow_modes = json::array();
  for (int k : slow)
    slow_modes.push_back({{"index", k},
                          {"lambda", detail::cplx_json(sd.modes[k].lambda)},
                          {"block", block_name(sd.modes[k].block)}});
  summary["slow_modes"] = slow_modes;
  json par = json::array();
  for (int k = 0; k < sol.params.size(); ++k) par.push_back(sol.params(k));
  summary["params"] = par;

  if (!sol.feasible) {
    summary["verified"] = false;
    summary["outputs"] = json::array();
    detail::write_summary(out_dir, "mpemba", summary);
    return summary;
  }

  const std::vector<double> grid = make_time_grid(sd, cfg.grid_points, cfg.grid_lo, cfg.grid_hi);
  const Trajectory ref = distance_trajectory(sd, rho0, grid);
  const Trajectory cand = distance_trajectory(sd, sol.state, grid);
  detail::write_trajectory_csv(detail::path_join(out_dir, "trajectory_reference.csv"), ref);
  detail::write_trajectory_csv(detail::path_join(out_dir, "trajectory_mpemba.csv"), cand);
  summary["outputs"] = {"trajectory_reference.csv", "trajectory_mpemba.csv"};

  try {
    const MpembaTiming timing = verify_mpemba(sd, sol, rho0, grid, cfg.epsilon);
    summary["verified"] = true;
    summary["t_crossing"] = timing.t_crossing;
    summary["t_ss_reference"] = timing.t_ss_reference;
    summary["t_ss_mpemba"] = timing.t_ss_candidate;
    summary["speedup"] = timing.t_ss_reference / timing.t_ss_candidate;
  } catch (const Error& e) {
    summary["verified"] = false;
    summary["verification_error"] = e.what();
  }
  detail::write_summary(out_dir, "mpemba", summary);
  return summary;
}

// Crossing and settling times across a coupling sweep. One optimization at the
// base point seeds every grid point so the trend is not polluted by multistart
// luck; each point still reseeds its own random starts from the master seed.
inline json cmd_timing_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (!cfg.axis1) throw ConfigError("timing-sweep needs sweep.axis1");
  const bool a1_is_g = cfg.axis1->param == "g";
  const bool a2_is_g = cfg.axis2 && cfg.axis2->param == "g";
  if (cfg.axis2 && !a1_is_g && !a2_is_g)
    throw ConfigError("timing-sweep supports at most one coupling axis");
  detail::ensure_output_dir(out_dir);

  const std::vector<double> v1 = axis_values(*cfg.axis1);
  const std::vector<double> v2 = cfg.axis2 ? axis_values(*cfg.axis2) : std::vector<double>{0.0};
  const int n1 = static_cast<int>(v1.size());
  const int n2 = cfg.axis2 ? static_cast<int>(v2.size()) : 1;

  // Warm start shared by every point, found once at the base parameters.
  std::optional<Eigen::VectorXd> anchor;
  json anchor_info;
  {
    const BlockLiouvillian L = assemble_block_liouvillian(cfg.model);
    const SpectralDecomposition sd = spectral_decompose(L);
    solve_steady_state(L);
    const MpembaSolution base = optimize_mpemba_state(
        sd, slowest_mode_set(sd), thermal_product_state(cfg.model), cfg.family,
        detail::optimizer_for(cfg));
    if (base.feasible) anchor = base.params;
    anchor_info = {{"feasible", base.feasible},
                   {"residual", base.residual},
                   {"distance_gain", base.distance_gain}};
  }

  struct Point {
    double g = 0.0, kappa = 0.0;
    std::optional<double> t_M, t_ss;
    bool feasible = false;
    bool ok = false;
    std::string error;
  };
  std::vector<Point> pts(static_cast<std::size_t>(n1) * n2);
  parallel_for(n1 * n2, cfg.threads, [&](int k) {
    const int i = k / n2, j = k % n2;
    Point& pt = pts[k];
    RefrigeratorParams p = cfg.model;
    apply_axis(p, cfg.axis1->param, v1[i]);
    if (cfg.axis2) apply_axis(p, cfg.axis2->param, v2[j]);
    pt.g = p.g;
    pt.kappa = a1_is_g ? (cfg.axis2 ? v2[j] : cfg.model.kappa_c) : v1[i];
    try {
      validate(p);
      const BlockLiouvillian L = assemble_block_liouvillian(p);
      const SpectralDecomposition sd = spectral_decompose(L);
      solve_steady_state(L);
      const DensityMatrix rho0 = thermal_product_state(p);
      OptimizerConfig ocfg = cfg.optimizer;
      ocfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k) + 1);
      ocfg.threads = 1;
      if (anchor) ocfg.extra_starts.push_back(*anchor);
      const MpembaSolution sol =
          optimize_mpemba_state(sd, slowest_mode_set(sd), rho0, cfg.family, ocfg);
      pt.feasible = sol.feasible;
      if (sol.feasible) {
        const std::vector<double> grid =
            make_time_grid(sd, cfg.grid_points, cfg.grid_lo, cfg.grid_hi);
        const Trajectory ref = distance_trajectory(sd, rho0, grid);
        const Trajectory cand = distance_trajectory(sd, sol.state, grid);
        if (const auto cross = mpemba_crossing_time(ref, cand)) pt.t_M = *cross;
        try {
          pt.t_ss = steady_state_time(cand, cfg.epsilon);
        } catch (const ConvergenceError&) {
        }
      }
      pt.ok = true;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
  });

  json failures = json::array();
  json rows = json::array();
  {
    CsvWriter w(detail::path_join(out_dir, "timing_sweep.csv"),
                {"g", "kappa", "t_M", "t_ss", "feasible"});
    for (int k = 0; k < n1 * n2; ++k) {
      const Point& pt = pts[k];
      if (!pt.ok) {
        w.row({csv_double(pt.g), csv_double(pt.kappa), "", "", "0"});
        failures.push_back({{"index", k}, {"error", pt.error}});
        continue;
      }
      w.row({csv_double(pt.g), csv_double(pt.kappa),
             pt.t_M ? csv_double(*pt.t_M) : std::string(),
             pt.t_ss ? csv_double(*pt.t_ss) : std::string(), pt.feasible ? "1" : "0"});
      rows.push_back({{"g", pt.g},
                      {"kappa", pt.kappa},
                      {"t_M", pt.t_M ? json(*pt.t_M) : json(nullptr)},
                      {"t_ss", pt.t_ss ? json(*pt.t_ss) : json(nullptr)},
                      {"feasible", pt.feasible}});
    }
  }

  json summary;
  summary["command"] = "timing-sweep";
  summary["config"] = config_to_json(cfg);
  summary["axis1"] = detail::axis_to_json(*cfg.axis1);
  if (cfg.axis2) summary["axis2"] = detail::axis_to_json(*cfg.axis2);
  summary["anchor"] = anchor_info;
  summary["n_points"] = n1 * n2;
  summary["n_failed"] = static_cast<int>(failures.size());
  summary["failures"] = failures;
  summary["points"] = rows;
  summary["outputs"] = {"timing_sweep.csv"};
  detail::write_summary(out_dir, "timing-sweep", summary);
  return summary;
}

}  // namespace qref

#endif
