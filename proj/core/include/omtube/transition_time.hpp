#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

#include "omtube/model.hpp"
#include "omtube/tube.hpp"

namespace omtube {

/// Closed form for zero drift: 2 delta |xf - x0| / (pi c^2).
double brownian_mptt(double x0, double xf, double delta, double c);

/// Energy level pi^2 c^4 / (8 delta^2) at which dS^mOM/dT vanishes.
double energy_shell_level(double c, double delta);

enum class MpttMethod { ClosedForm, ActionMinimization, EnergyShell };
std::string_view to_string(MpttMethod method) noexcept;

struct TransitionTimeResult {
  double t_star = 0.0;
  MpttMethod method = MpttMethod::ActionMinimization;
  double s_mom = 0.0;  ///< modified action at t_star
  double rho = std::numeric_limits<double>::quiet_NaN();
  double t_upper = std::numeric_limits<double>::quiet_NaN();
  bool condition_ok = false;  ///< energy_shell_level exceeds every E(T) seen
  double condition_margin = std::numeric_limits<double>::quiet_NaN();
};

/// Minimizes T -> S^mOM_T(psi_T) over [t_lo, t_hi]: 32-point geometric scan
/// (T values whose shooting fails are skipped), then golden section to `tol`.
/// Throws NoInteriorMinimum when the scan is monotone.
TransitionTimeResult minimize_modified_action(const SdeSystem& system, TubeSpec tube, double t_lo, double t_hi,
                                              double tol = 1e-6, unsigned workers = 0);

/// Root of E(T) = energy_shell_level in [t_lo, t_hi] by bisection after a
/// 16-point scan. Throws NoSignChange without a crossing and MultipleRoots
/// when the scan sees more than one.
double energy_shell_time(const SdeSystem& system, TubeSpec tube, double t_lo, double t_hi);

struct TransitionTimeBounds {
  double rho = 0.0;
  double t_upper = 0.0;
  double mean_exit = 0.0;  ///< mean exit time from the enlarged domain
  double theta_max = 0.0;
  double t_theta = 0.0;  ///< maximizer of theta
  bool rho_degenerate = false;
  BoundConstants constants;
};

/// Upper bound: mean exit time from (x0 - l - delta, x0 + l + delta) over
/// max_t theta(t). Lower bound: the first time at which the Gaussian
/// reachability bound on P(|X_t - xf| < delta) reaches max theta.
TransitionTimeBounds transition_time_bounds(const SdeSystem& system, TubeSpec tube);

/// Gaussian reachability bound used for rho.
double reachability_bound(const SdeSystem& system, double delta, double t, double sup_abs_drift);

struct ConditionReport {
  bool ok = false;
  double threshold = 0.0;  ///< energy_shell_level
  double max_energy = 0.0;
  double margin = 0.0;  ///< threshold - max_energy
  std::size_t evaluated = 0;
};

/// threshold > max over t_grid of E(T); unsolvable T are skipped.
ConditionReport condition_check(const SdeSystem& system, double delta, std::span<const double> t_grid);

}  // namespace omtube
