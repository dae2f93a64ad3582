#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <qref/qref.hpp>

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> family;
  std::optional<double> epsilon;
  bool no_cold_bath = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_option("--family", f.family,
                  "unitary family: global, local-both, local-qubit, local-qutrit");
  cmd->add_option("--epsilon", f.epsilon, "steady-state distance threshold");
  cmd->add_flag("--no-cold-bath", f.no_cold_bath, "detach the cold bath (kappa_c = 0)");
}

qref::ExperimentConfig load_config(const CommonFlags& f) {
  qref::ExperimentConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw qref::ConfigError("cannot open config file '" + f.config_path + "'");
    qref::json j;
    try {
      in >> j;
    } catch (const qref::json::exception& e) {
      throw qref::ConfigError("config parse error: " + std::string(e.what()));
    }
    cfg = qref::config_from_json(j);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.family) cfg.family = qref::family_from_name(*f.family);
  if (f.epsilon) {
    if (!(*f.epsilon > 0.0)) throw qref::ConfigError("epsilon must be > 0");
    cfg.epsilon = *f.epsilon;
  }
  if (f.no_cold_bath) cfg.model.kappa_c = 0.0;
  qref::validate(cfg.model);
  return cfg;
}

std::string resolve_out(const CommonFlags& f, const qref::ExperimentConfig& cfg) {
  return qref::resolve_output_dir(f.out_dir, cfg.output_dir, std::getenv("QREF_OUT_DIR"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qubit-qutrit refrigerator: spectra, relaxation, and accelerated cooling"};
  app.require_subcommand(1);

  CommonFlags f_spectrum, f_evolve, f_steady, f_mpemba, f_timing;
  CLI::App* c_spectrum =
      app.add_subcommand("spectrum", "eigenmode census of the generator");
  add_common(c_spectrum, f_spectrum);
  CLI::App* c_evolve =
      app.add_subcommand("evolve", "relax the thermal product state");
  add_common(c_evolve, f_evolve);
  CLI::App* c_steady =
      app.add_subcommand("steady-sweep", "steady-state cooling over a parameter grid");
  add_common(c_steady, f_steady);
  CLI::App* c_mpemba =
      app.add_subcommand("mpemba", "search a unitary family for accelerated relaxation");
  add_common(c_mpemba, f_mpemba);
  CLI::App* c_timing =
      app.add_subcommand("timing-sweep", "crossing and settling times over a coupling sweep");
  add_common(c_timing, f_timing);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    qref::json summary;
    if (c_spectrum->parsed()) {
      const auto cfg = load_config(f_spectrum);
      summary = qref::cmd_spectrum(cfg, resolve_out(f_spectrum, cfg));
      std::cout << summary["census_line"].get<std::string>() << '\n';
      const auto& l2 = summary["lambda2"];
      std::cout << "lambda_2 = " << l2["re"].get<double>() << " + "
                << l2["im"].get<double>() << "i\n";
      std::cout << "steady-state qubit temperature " << summary["steady"]["T_s"].get<double>()
                << " (virtual temperature " << summary["steady"]["virtual_temperature"].get<double>()
                << ")\n";
    } else if (c_evolve->parsed()) {
      const auto cfg = load_config(f_evolve);
      summary = qref::cmd_evolve(cfg, resolve_out(f_evolve, cfg));
      if (summary["converged"].get<bool>())
        std::cout << "settled below epsilon = " << cfg.epsilon << " at t = "
                  << summary["t_ss"].get<double>() << '\n';
      else
        std::cout << "did not settle below epsilon = " << cfg.epsilon
                  << " within the time window\n";
    } else if (c_steady->parsed()) {
      const auto cfg = load_config(f_steady);
      summary = qref::cmd_steady_sweep(cfg, resolve_out(f_steady, cfg));
      std::cout << summary["n_points"].get<int>() << " points, "
                << summary["n_failed"].get<int>() << " failed\n";
    } else if (c_mpemba->parsed()) {
      const auto cfg = load_config(f_mpemba);
      summary = qref::cmd_mpemba(cfg, resolve_out(f_mpemba, cfg));
      if (!summary["feasible"].get<bool>()) {
        std::cout << "family " << summary["family"].get<std::string>()
                  << ": no state found clearing the slow modes (best residual "
                  << summary["residual"].get<double>() << ")\n";
      } else if (summary["verified"].get<bool>()) {
        std::cout << "family " << summary["family"].get<std::string>()
                  << ": crossing at t = " << summary["t_crossing"].get<double>()
                  << ", settles at t = " << summary["t_ss_mpemba"].get<double>()
                  << " vs reference " << summary["t_ss_reference"].get<double>() << '\n';
      } else {
        std::cout << "family " << summary["family"].get<std::string>()
                  << ": state found but not verified: "
                  << summary["verification_error"].get<std::string>() << '\n';
      }
    } else if (c_timing->parsed()) {
      const auto cfg = load_config(f_timing);
      summary = qref::cmd_timing_sweep(cfg, resolve_out(f_timing, cfg));
      std::cout << summary["n_points"].get<int>() << " points, "
                << summary["n_failed"].get<int>() << " failed\n";
    }
    return 0;
  } catch (const qref::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qref::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
