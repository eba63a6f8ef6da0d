#pragma once

#include <vector>

#include "omtube/model.hpp"
#include "omtube/path.hpp"

namespace omtube {

/// Breakdown of an action value; total is the sum of the three parts.
struct ActionValue {
  double total = 0.0;
  double kinetic_part = 0.0;     ///< int 1/2 (psi' - b)^2
  double divergence_part = 0.0;  ///< int kappa c^2 b'
  double tube_penalty = 0.0;     ///< pi^2 c^4 T / (8 delta^2), modified action only
};

/// Second-order finite-difference velocity: central in the interior,
/// one-sided three-point at the ends. Needs at least 3 samples.
std::vector<double> path_velocity(const Path& path);

/// int_0^T 1/2 [(psi' - b(psi))^2 + 2 kappa c^2 b'(psi)] dt by the trapezoid rule.
ActionValue kappa_action(const Path& psi, const SdeSystem& system, double kappa);

/// Onsager-Machlup action: kappa_action with kappa = 1/2.
ActionValue om_action(const Path& psi, const SdeSystem& system);

/// OM action plus the tube penalty pi^2 c^4 T / (8 delta^2); delta > 0.
ActionValue modified_om_action(const Path& psi, const SdeSystem& system, double delta);

/// Penalty term alone.
double tube_penalty(double c, double delta, double T);

/// Freidlin-Wentzell action int (psi' - b)^2 dt, without a factor 1/2.
double fw_action(const Path& psi, const SdeSystem& system);

}  // namespace omtube
