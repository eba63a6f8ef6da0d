#include "omtube/action.hpp"

#include <numbers>

#include "omtube/error.hpp"

namespace omtube {

namespace {

void require_points(const Path& path) {
  if (path.size() < 3) throw Error(ErrorKind::PathTooShort, "action needs a path with at least 3 samples");
}

template <typename F>
double trapezoid(const Path& path, F&& integrand) {
  const std::size_t n = path.size();
  double sum = 0.5 * (integrand(0) + integrand(n - 1));
  for (std::size_t i = 1; i + 1 < n; ++i) sum += integrand(i);
  return sum * path.dt();
}

}  // namespace

std::vector<double> path_velocity(const Path& path) {
  require_points(path);
  const std::size_t n = path.size();
  const double h = path.dt();
  std::vector<double> v(n);
  v[0] = (-3.0 * path[0] + 4.0 * path[1] - path[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (path[i + 1] - path[i - 1]) / (2.0 * h);
  v[n - 1] = (3.0 * path[n - 1] - 4.0 * path[n - 2] + path[n - 3]) / (2.0 * h);
  return v;
}

ActionValue kappa_action(const Path& psi, const SdeSystem& system, double kappa) {
  const auto v = path_velocity(psi);
  const auto& drift = system.drift;
  ActionValue a;
  a.kinetic_part = trapezoid(psi, [&](std::size_t i) {
    const double r = v[i] - drift.b(psi[i]);
    return 0.5 * r * r;
  });
  a.divergence_part = kappa * system.c * system.c * trapezoid(psi, [&](std::size_t i) { return drift.db(psi[i]); });
  a.total = a.kinetic_part + a.divergence_part;
  return a;
}

ActionValue om_action(const Path& psi, const SdeSystem& system) { return kappa_action(psi, system, 0.5); }

double tube_penalty(double c, double delta, double T) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "tube radius must be positive");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double c2 = c * c;
  return pi2 * c2 * c2 * T / (8.0 * delta * delta);
}

ActionValue modified_om_action(const Path& psi, const SdeSystem& system, double delta) {
  ActionValue a = om_action(psi, system);
  a.tube_penalty = tube_penalty(system.c, delta, psi.duration());
  a.total = a.kinetic_part + a.divergence_part + a.tube_penalty;
  return a;
}

double fw_action(const Path& psi, const SdeSystem& system) {
  const auto v = path_velocity(psi);
  return trapezoid(psi, [&](std::size_t i) {
    const double r = v[i] - system.drift.b(psi[i]);
    return r * r;
  });
}

}  // namespace omtube
