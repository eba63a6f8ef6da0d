#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "omtube/action.hpp"
#include "omtube/model.hpp"
#include "omtube/path.hpp"

namespace omtube {

/// psi'' = b'(psi) b(psi) + (c^2/2) b''(psi); equals -d/dx path_potential.
double el_rhs(const SdeSystem& system, double x);

/// el_rhs as a polynomial in x.
Polynomial el_rhs_polynomial(const SdeSystem& system);

/// RK4 steps used when the caller passes 0: max(1000, ceil(T / 1e-3)).
std::size_t default_rk4_steps(double T);

/// Result of one initial-value integration of the Euler-Lagrange flow.
struct Shot {
  double terminal = 0.0;       ///< psi(T); +/-inf when the shot diverged
  Path path;                   ///< truncated at divergence
  std::vector<double> velocity;
  bool diverged = false;       ///< |psi| exceeded 10 l
};

/// Classical RK4 on (psi, psi') from (x0, v0) over [0, T]. n_steps >= 16.
Shot shoot(const SdeSystem& system, double T, double v0, std::size_t n_steps);

/// psi(T) only, without storing the trajectory; +/-inf on divergence.
double shoot_terminal(const SdeSystem& system, double T, double v0, std::size_t n_steps);

inline constexpr double kDefaultShootingTol = 1e-9;
inline constexpr double kEnergyDriftTol = 1e-6;

struct ShootingSolution {
  Path path;
  std::vector<double> velocity;
  double v0 = 0.0;
  double energy = 0.0;    ///< 1/2 v0^2 + path_potential(x0)
  double residual = 0.0;  ///< |psi(T) - xf|
  ActionValue om_action;
  std::size_t root_count = 0;  ///< connecting solutions found by the scan
};

/// Shooting solution of psi'' = el_rhs(psi), psi(0) = x0, psi(T) = xf.
/// v0 is scanned over [-V, V], V = 4(|xf - x0| / T + sup_D |b|), sign
/// changes of psi(T) - xf are refined by bisection and the root with least
/// OM action is returned. Throws NoBracket when nothing connects and
/// EnergyDrift when the accepted path violates the energy budget.
ShootingSolution solve_mptp(const SdeSystem& system, double T, double tol = kDefaultShootingTol,
                            std::size_t n_steps = 0);

struct EnergyProfile {
  double mean = 0.0;
  double drift = 0.0;  ///< max_t |E(t) - E(0)|
};

EnergyProfile energy_profile(const ShootingSolution& solution, const SdeSystem& system);

/// Conserved energy E(T) of the shooting solution at T. When the path is
/// strictly monotone the travel time int |dpsi| / sqrt(2E - 2U(psi)) must
/// reproduce T within 1%, else NoConvergence is thrown.
double energy_of_time(const SdeSystem& system, double T, double tol = kDefaultShootingTol);

/// int |dpsi| / sqrt(2(E - U(psi))) along a monotone path; NaN if the path
/// is not strictly monotone.
double reparameterized_time(const ShootingSolution& solution, const SdeSystem& system);

/// Discrete OM action of node values x_0..x_N on a uniform grid: midpoint
/// drift in the kinetic term, trapezoid rule for (c^2/2) b'.
double discrete_om_action(const SdeSystem& system, std::span<const double> x, double dt);

struct DirectMinimum {
  Path path;
  double action = 0.0;     ///< discrete_om_action at the returned nodes
  double grad_norm = 0.0;  ///< infinity norm of the gradient divided by dt
  int iterations = 0;
};

/// Independent minimizer of discrete_om_action with fixed endpoints, started
/// from the straight line: gradient descent with Barzilai-Borwein trial
/// steps and non-monotone backtracking. Stops when grad_norm is below
/// 1e-8 max(1, |action|); throws NoConvergence after `iters` iterations.
DirectMinimum direct_minimizer(const SdeSystem& system, double T, std::size_t n_nodes = 257, int iters = 400000);

struct ActionRow {
  double T = 0.0;
  double s_om = 0.0;
  double s_mom = 0.0;
  double energy = 0.0;
  bool ok = false;
  std::string error;
};

/// OM and modified OM action of the shooting solution at each T.
std::vector<ActionRow> action_vs_time(const SdeSystem& system, double delta, std::span<const double> T_grid,
                                      unsigned workers = 0);

/// Finite maxima over a T-grid of the speed and acceleration of the
/// shooting solutions.
struct RegularityReport {
  double max_speed = 0.0;
  double max_acceleration = 0.0;
  double acceleration_bound = 0.0;  ///< sup of |el_rhs| over the hull of all paths
  std::size_t solved = 0;
  std::size_t failed = 0;
};

RegularityReport regularity_diagnostics(const SdeSystem& system, std::span<const double> T_grid);

}  // namespace omtube
