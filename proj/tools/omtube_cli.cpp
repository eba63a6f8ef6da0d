// omtube command-line front end. Every subcommand reads an optional JSON
// config, writes CSV to stdout (or to files given with --out) and maps
// validation errors to exit code 2 and numerical failures to exit code 3.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "omtube/action.hpp"
#include "omtube/config.hpp"
#include "omtube/error.hpp"
#include "omtube/harness.hpp"
#include "omtube/optimize.hpp"
#include "omtube/simulate.hpp"
#include "omtube/transition_time.hpp"
#include "omtube/tube.hpp"
#include "omtube/variational.hpp"

namespace {

using namespace omtube;

struct Common {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;

  ExperimentConfig load() const {
    ExperimentConfig cfg = config_file.empty() ? parse_config("{}") : load_config(config_file);
    if (seed) cfg.sim.seed = *seed;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_file, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", common.seed, "Override the master seed");
  cmd->add_option("--workers", common.workers, "Worker threads (0 = hardware concurrency)");
}

std::ostream& csv(std::ostream& out) { return out << std::setprecision(12); }

void print_warnings(const SdeSystem& system) {
  std::vector<std::string> warnings;
  validate_system(system, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Most probable transition paths and times for 1-D SDEs"};
  app.require_subcommand(1);
  Common common;

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo first-transition statistics");
  add_common(sim_cmd, common);
  std::optional<std::size_t> sim_n;
  std::string sim_path_out;
  sim_cmd->add_option("--n", sim_n, "Number of paths (default: experiment.n_paths)");
  sim_cmd->add_option("--path-out", sim_path_out, "Also write path 0 as t,x CSV");

  // tube-prob
  auto* tube_cmd = app.add_subcommand("tube-prob", "Brownian tube probability series");
  add_common(tube_cmd, common);
  std::optional<double> tube_c;
  double tube_delta = 0.5, tube_T = 1.0, tube_tol = 1e-12;
  tube_cmd->add_option("--c", tube_c, "Noise intensity (default: config c)");
  tube_cmd->add_option("--delta", tube_delta, "Tube half-width")->required();
  tube_cmd->add_option("--T", tube_T, "Time horizon")->required();
  tube_cmd->add_option("--tol", tube_tol, "Series truncation tolerance");

  // action
  auto* action_cmd = app.add_subcommand("action", "Evaluate an action functional on a path");
  add_common(action_cmd, common);
  std::string action_path, action_functional = "om";
  std::optional<double> action_kappa, action_delta;
  action_cmd->add_option("--path", action_path, "Path CSV with header t,x")->required()->check(CLI::ExistingFile);
  action_cmd->add_option("--kappa", action_kappa, "Discretization parameter (default: config kappa)");
  action_cmd->add_option("--delta", action_delta, "Tube size for the modified functional");
  action_cmd->add_option("--functional", action_functional, "om, kappa, mom or fw")
      ->check(CLI::IsMember({"om", "kappa", "mom", "fw"}));

  // mptp
  auto* mptp_cmd = app.add_subcommand("mptp", "Most probable transition path by shooting");
  add_common(mptp_cmd, common);
  double mptp_T = 1.0;
  std::string mptp_out;
  mptp_cmd->add_option("--T", mptp_T, "Transition time")->required();
  mptp_cmd->add_option("--out", mptp_out, "Write the path as t,x CSV");

  // action-curve
  auto* curve_cmd = app.add_subcommand("action-curve", "OM and modified OM action against T");
  add_common(curve_cmd, common);
  double curve_delta = 0.5, curve_tmin = 0.1, curve_tmax = 2.0;
  std::size_t curve_n = 40;
  curve_cmd->add_option("--delta", curve_delta, "Tube size")->required();
  curve_cmd->add_option("--tmin", curve_tmin, "Smallest T");
  curve_cmd->add_option("--tmax", curve_tmax, "Largest T");
  curve_cmd->add_option("--n", curve_n, "Number of grid points")->check(CLI::Range(2, 100000));

  // mptt
  auto* mptt_cmd = app.add_subcommand("mptt", "Most probable transition time");
  add_common(mptt_cmd, common);
  double mptt_delta = 0.5, mptt_tmin = 0.05, mptt_tmax = 3.0;
  std::string mptt_method = "action";
  mptt_cmd->add_option("--delta", mptt_delta, "Tube size")->required();
  mptt_cmd->add_option("--method", mptt_method, "action, shell or closed")
      ->check(CLI::IsMember({"action", "shell", "closed"}));
  mptt_cmd->add_option("--tmin", mptt_tmin, "Lower end of the T bracket");
  mptt_cmd->add_option("--tmax", mptt_tmax, "Upper end of the T bracket");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Lower and upper bounds on the transition time");
  add_common(bounds_cmd, common);
  double bounds_delta = 0.5;
  bounds_cmd->add_option("--delta", bounds_delta, "Tube size")->required();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Transition times and tube sizes of sampled paths");
  add_common(exp_cmd, common);
  std::optional<std::size_t> exp_n;
  std::string exp_records, exp_bins;
  bool exp_exact = false;
  std::size_t exp_audit = 0;
  exp_cmd->add_option("--n", exp_n, "Number of paths (default: experiment.n_paths)");
  exp_cmd->add_option("--records", exp_records, "Write per-path records CSV");
  exp_cmd->add_option("--bins", exp_bins, "Write bin statistics CSV (default: stdout)");
  exp_cmd->add_flag("--exact", exp_exact, "Solve the MPTP at every transition time instead of interpolating");
  exp_cmd->add_option("--audit", exp_audit, "Compare interpolated and exact tube sizes on this many records");

  // figures
  auto* fig_cmd = app.add_subcommand("figures", "Write figure data and SVG plots");
  add_common(fig_cmd, common);
  std::string fig_out = "figures";
  fig_cmd->add_option("--out", fig_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig cfg = common.load();
    const SdeSystem& system = cfg.system;

    if (*sim_cmd) {
      print_warnings(system);
      const std::size_t n = sim_n.value_or(cfg.n_paths);
      const auto summary = simulate_ensemble(system, cfg.sim, n, common.workers);
      csv(std::cout) << "n_paths,transitions,censored_exit,no_transition,fraction\n"
                     << summary.n_paths << ',' << summary.transitions.size() << ',' << summary.n_censored_exit << ','
                     << summary.n_no_transition << ',' << summary.transition_fraction() << '\n';
      if (!sim_path_out.empty()) write_path_csv(sim_path_out, simulate_path(system, cfg.sim, path_seed(cfg.sim, 0)).path);
    } else if (*tube_cmd) {
      const double c = tube_c.value_or(system.c);
      csv(std::cout) << "T,series,one_term\n"
                     << tube_T << ',' << brownian_tube_probability(c, tube_delta, tube_T, tube_tol) << ','
                     << brownian_tube_one_term(c, tube_delta, tube_T) << '\n';
    } else if (*action_cmd) {
      const Path psi = read_path_csv(action_path);
      ActionValue v;
      if (action_functional == "om") {
        v = om_action(psi, system);
      } else if (action_functional == "kappa") {
        v = kappa_action(psi, system, action_kappa.value_or(system.kappa));
      } else if (action_functional == "mom") {
        if (!action_delta) throw Error(ErrorKind::InvalidInput, "--delta is required for the modified functional");
        v = modified_om_action(psi, system, *action_delta);
      } else {
        v.total = v.kinetic_part = fw_action(psi, system);
      }
      csv(std::cout) << "functional,total,kinetic_part,divergence_part,tube_penalty\n"
                     << action_functional << ',' << v.total << ',' << v.kinetic_part << ',' << v.divergence_part
                     << ',' << v.tube_penalty << '\n';
    } else if (*mptp_cmd) {
      print_warnings(system);
      const auto sol = solve_mptp(system, mptp_T);
      const auto energy = energy_profile(sol, system);
      csv(std::cerr) << "v0=" << sol.v0 << " energy=" << sol.energy << " drift=" << energy.drift
                     << " om_action=" << sol.om_action.total << '\n';
      if (mptp_out.empty()) {
        write_path_csv(std::cout, sol.path);
      } else {
        write_path_csv(mptp_out, sol.path);
      }
    } else if (*curve_cmd) {
      print_warnings(system);
      const auto grid = uniform_grid(curve_tmin, curve_tmax, curve_n);
      const auto rows = action_vs_time(system, curve_delta, grid, common.workers);
      csv(std::cout) << "T,s_om,s_mom,energy\n";
      for (const auto& r : rows) std::cout << r.T << ',' << r.s_om << ',' << r.s_mom << ',' << r.energy << '\n';
    } else if (*mptt_cmd) {
      print_warnings(system);
      const TubeSpec tube = make_tube(system, mptt_delta);
      TransitionTimeResult r;
      if (mptt_method == "closed") {
        if (!system.drift.is_zero()) throw Error(ErrorKind::InvalidInput, "closed form needs zero drift");
        r.t_star = brownian_mptt(system.x0, system.xf, mptt_delta, system.c);
        r.method = MpttMethod::ClosedForm;
        r.condition_ok = true;
        const Path line = straight_line(system.x0, system.xf, r.t_star, 1024);
        r.s_mom = modified_om_action(line, system, mptt_delta).total;
      } else if (mptt_method == "shell") {
        r.t_star = energy_shell_time(system, tube, mptt_tmin, mptt_tmax);
        r.method = MpttMethod::EnergyShell;
        r.s_mom = solve_mptp(system, r.t_star).om_action.total + tube_penalty(system.c, mptt_delta, r.t_star);
        r.condition_ok = true;
      } else {
        r = minimize_modified_action(system, tube, mptt_tmin, mptt_tmax, 1e-6, common.workers);
      }
      if (std::isnan(r.rho)) {
        const auto b = transition_time_bounds(system, tube);
        r.rho = b.rho;
        r.t_upper = b.t_upper;
      }
      csv(std::cout) << "delta,t_star,s_mom,rho,t_upper,condition_ok\n"
                     << mptt_delta << ',' << r.t_star << ',' << r.s_mom << ',' << r.rho << ',' << r.t_upper << ','
                     << (r.condition_ok ? "true" : "false") << '\n';
    } else if (*bounds_cmd) {
      print_warnings(system);
      const auto b = transition_time_bounds(system, make_tube(system, bounds_delta));
      csv(std::cout) << "delta,rho,t_upper,mean_exit,theta_max,t_theta,rho_degenerate\n"
                     << bounds_delta << ',' << b.rho << ',' << b.t_upper << ',' << b.mean_exit << ',' << b.theta_max
                     << ',' << b.t_theta << ',' << (b.rho_degenerate ? "true" : "false") << '\n';
    } else if (*exp_cmd) {
      print_warnings(system);
      ExperimentConfig run = cfg;
      if (exp_n) run.n_paths = *exp_n;
      const auto result = run_experiment(run, ExperimentOptions{!exp_exact, 1e-2, common.workers});
      std::cerr << "paths=" << result.n_paths << " transitions=" << result.n_transitions
                << " mptp_failures=" << result.n_mptp_failures << " censored_exit=" << result.n_censored_exit << '\n';
      if (!exp_records.empty()) {
        std::ofstream out(exp_records);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + exp_records);
        write_records_csv(out, result.records);
      }
      if (exp_bins.empty()) {
        write_bins_csv(std::cout, result.bins);
      } else {
        std::ofstream out(exp_bins);
        if (!out) throw Error(ErrorKind::Io, "cannot open " + exp_bins);
        write_bins_csv(out, result.bins);
      }
      if (exp_audit > 0) {
        const auto audit = audit_memoization(run, result.records, exp_audit, common.workers);
        std::cerr << "audit: " << audit.audited << " records, max |memo - exact| = " << audit.max_abs_diff << '\n';
      }
    } else if (*fig_cmd) {
      FigureOptions options;
      options.workers = common.workers;
      const auto manifest = reproduce_figures(cfg, fig_out, options);
      std::cout << "file,rows\n";
      for (const auto& m : manifest) std::cout << m.file << ',' << m.rows << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::Validation ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
