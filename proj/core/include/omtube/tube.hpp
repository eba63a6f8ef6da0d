#pragma once

#include <cstddef>

#include "omtube/model.hpp"
#include "omtube/path.hpp"
#include "omtube/simulate.hpp"

namespace omtube {

inline constexpr double kDefaultSeriesTol = 1e-12;

/// Probability that c*W stays within (-delta, delta) on [0, T]:
///   sum_n (-1)^n 4/((2n+1) pi) exp(-(2n+1)^2 pi^2 c^2 T / (8 delta^2)).
/// Truncated once the next term is below `tol`; clamped to [0, 1]. For very
/// small T the equivalent image-charge sum is used instead, since the
/// eigenfunction sum needs O(delta / (c sqrt(T))) terms there.
double brownian_tube_probability(double c, double delta, double T, double tol = kDefaultSeriesTol);

/// Leading term 4/pi exp(-pi^2 c^2 T / (8 delta^2)).
double brownian_tube_one_term(double c, double delta, double T);

/// First two terms of the series (n = 0, 1).
double mu1(double c, double delta, double t);

enum class TubeMonitoring {
  GridPoints,     ///< sup over grid nodes only
  BrownianBridge  ///< grid nodes plus per-step bridge survival weights
};

struct TubeEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  ///< 99% normal approximation
  std::size_t n_paths = 0;
};

/// Monte Carlo estimate of P(sup_t |X_t - psi(t)| < delta) over psi's time
/// window. psi.dt must be an integer multiple of config.dt; psi is linearly
/// interpolated onto the simulation grid. Throws IncompatibleGrids otherwise.
TubeEstimate empirical_tube_probability(const SdeSystem& system, const Path& psi, double delta,
                                        const SimConfig& config, std::size_t n,
                                        TubeMonitoring monitoring = TubeMonitoring::BrownianBridge,
                                        unsigned workers = 0);

/// Mean exit time u(x_eval) from (x0 - h, x0 + h), solving
/// (c^2/2) u'' + b u' = -1, u = 0 on the boundary, by double quadrature
/// with the scale density exp(-2 U(x) / c^2). Throws QuadratureFailure when
/// the adaptive quadrature misses 1e-8 relative accuracy.
double mean_exit_time_bvp(const SdeSystem& system, double halfwidth, double x_eval);

/// min(1, mean_exit / T).
double markov_upper_bound(double mean_exit_enlarged, double T);

struct BoundConstants {
  double h0 = 0.0;  ///< sup_{|x - xf| < delta} |U(x) - U(xf)|
  double h1 = 0.0;  ///< sup over the tube region of |b b'|
  double h2 = 0.0;  ///< sup over the tube region of |b''|
  double c0 = 1.0;
  double c1 = 0.0;
  double k0 = 1.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

/// Suprema h0, h1, h2 over [min psi - delta, max psi + delta]; the c/k
/// members keep their defaults.
BoundConstants tube_region_constants(const SdeSystem& system, const Path& psi, double delta);

/// All constants of the exponential lower bound, built on the straight line
/// from x0 to xf.
BoundConstants lower_bound_constants(const SdeSystem& system, TubeSpec tube);

/// k0 exp(-k1/t - k2 t) mu1(t); returns 0 on underflow.
double theta_bound(double t, const BoundConstants& constants, double c, double delta);

struct ThetaMaximum {
  double t = 0.0;
  double value = 0.0;
};

/// Maximizer of theta_bound: log-grid scan over [1e-4, 1e3] then golden section.
ThetaMaximum maximize_theta(const BoundConstants& constants, double c, double delta);

}  // namespace omtube
