#include "omtube/transition_time.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "omtube/action.hpp"
#include "omtube/error.hpp"
#include "omtube/optimize.hpp"
#include "omtube/parallel.hpp"
#include "omtube/variational.hpp"

namespace omtube {

double brownian_mptt(double x0, double xf, double delta, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::BadNoise, "noise intensity c must be positive");
  const double dist = std::abs(xf - x0);
  if (!(delta > 0.0 && delta < dist)) throw Error(ErrorKind::BadTube, "tube radius must lie in (0, |xf - x0|)");
  return 2.0 * delta * dist / (std::numbers::pi * c * c);
}

double energy_shell_level(double c, double delta) { return tube_penalty(c, delta, 1.0); }

std::string_view to_string(MpttMethod method) noexcept {
  switch (method) {
    case MpttMethod::ClosedForm: return "closed";
    case MpttMethod::ActionMinimization: return "action";
    case MpttMethod::EnergyShell: return "shell";
  }
  return "unknown";
}

namespace {

void check_bracket(double t_lo, double t_hi) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw Error(ErrorKind::InvalidInput, "time bracket must satisfy 0 < t_lo < t_hi");
}

struct Sample {
  double T = 0.0;
  double s_mom = 0.0;
  double energy = 0.0;
  bool ok = false;
};

Sample modified_action_at(const SdeSystem& system, double delta, double T) {
  const auto sol = solve_mptp(system, T);
  return {T, sol.om_action.total + tube_penalty(system.c, delta, T), energy_profile(sol, system).mean, true};
}

}  // namespace

TransitionTimeResult minimize_modified_action(const SdeSystem& system, TubeSpec tube, double t_lo, double t_hi,
                                              double tol, unsigned workers) {
  check_bracket(t_lo, t_hi);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerance must be positive");
  const double delta = tube.delta;
  const auto grid = geometric_grid(t_lo, t_hi, 32);
  std::vector<Sample> samples(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    try {
      samples[i] = modified_action_at(system, delta, grid[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoBracket) throw;
      samples[i] = {grid[i], 0.0, 0.0, false};
    }
  });

  std::vector<Sample> ok;
  for (const auto& s : samples) {
    if (s.ok) ok.push_back(s);
  }
  if (ok.size() < 3) throw Error(ErrorKind::NoBracket, "fewer than three shootable times in the bracket");
  const auto best = static_cast<std::size_t>(
      std::min_element(ok.begin(), ok.end(), [](const Sample& a, const Sample& b) { return a.s_mom < b.s_mom; }) -
      ok.begin());
  if (best == 0 || best + 1 == ok.size()) {
    std::ostringstream os;
    os << "modified action is smallest at the " << (best == 0 ? "lower" : "upper") << " end T = " << ok[best].T
       << " of the scanned bracket";
    throw Error(ErrorKind::NoInteriorMinimum, os.str());
  }

  const auto m = golden_section_minimize(
      [&](double T) { return modified_action_at(system, delta, T).s_mom; }, ok[best - 1].T, ok[best + 1].T, tol);

  TransitionTimeResult result;
  result.t_star = m.x;
  result.s_mom = m.fx;
  result.method = MpttMethod::ActionMinimization;
  const double threshold = energy_shell_level(system.c, delta);
  double max_energy = -std::numeric_limits<double>::infinity();
  for (const auto& s : ok) max_energy = std::max(max_energy, s.energy);
  result.condition_ok = threshold > max_energy;
  result.condition_margin = threshold - max_energy;
  return result;
}

double energy_shell_time(const SdeSystem& system, TubeSpec tube, double t_lo, double t_hi) {
  check_bracket(t_lo, t_hi);
  const double target = energy_shell_level(system.c, tube.delta);
  const auto grid = geometric_grid(t_lo, t_hi, 16);
  std::vector<std::optional<double>> gap(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      gap[i] = energy_of_time(system, grid[i]) - target;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoBracket) throw;
    }
  }
  std::vector<std::size_t> crossings;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!gap[i]) continue;
    if (prev && std::signbit(*gap[*prev]) != std::signbit(*gap[i])) crossings.push_back(i);
    prev = i;
  }
  if (crossings.empty()) throw Error(ErrorKind::NoSignChange, "E(T) does not cross the energy shell level in the bracket");
  if (crossings.size() > 1) {
    throw Error(ErrorKind::MultipleRoots,
                std::to_string(crossings.size()) + " crossings of the energy shell level in the bracket");
  }
  std::size_t hi_i = crossings.front();
  std::size_t lo_i = hi_i - 1;
  while (!gap[lo_i]) --lo_i;
  double a = grid[lo_i], b = grid[hi_i];
  double fa = *gap[lo_i];
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = energy_of_time(system, m) - target;
    if (std::abs(fm) < 1e-6 * target || b - a < 1e-13 * b) return m;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double reachability_bound(const SdeSystem& system, double delta, double t, double sup_abs_drift) {
  const double c2 = system.c * system.c;
  const double gap = std::max(0.0, system.distance() - delta - t * sup_abs_drift);
  return 2.0 * delta / std::sqrt(2.0 * std::numbers::pi * c2 * t) * std::exp(-gap * gap / (2.0 * c2 * t));
}

TransitionTimeBounds transition_time_bounds(const SdeSystem& system, TubeSpec tube) {
  const double delta = tube.delta;
  TransitionTimeBounds out;
  out.constants = lower_bound_constants(system, tube);
  const auto theta = maximize_theta(out.constants, system.c, delta);
  out.theta_max = theta.value;
  out.t_theta = theta.t;
  out.mean_exit = mean_exit_time_bvp(system, system.l + delta, system.x0);
  out.t_upper = out.theta_max > 0.0 ? out.mean_exit / out.theta_max : std::numeric_limits<double>::infinity();

  const double sup_b = system.drift.polynomial().max_abs_on(system.domain_lo(), system.domain_hi());
  auto g = [&](double t) { return reachability_bound(system, delta, t, sup_b); };
  const double t_max = std::isfinite(out.t_upper) ? std::max(out.t_upper, 1.0) : 1e6;
  const auto grid = geometric_grid(1e-10, t_max, 4000);
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (g(grid[i]) >= out.theta_max) {
      first = i;
      break;
    }
  }
  if (!first || *first == 0) {
    // Never below (or already above at the smallest t): no usable lower bound.
    out.rho = 0.0;
    out.rho_degenerate = true;
    return out;
  }
  double a = grid[*first - 1], b = grid[*first];
  for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
    const double m = 0.5 * (a + b);
    (g(m) < out.theta_max ? a : b) = m;
  }
  out.rho = a;
  return out;
}

ConditionReport condition_check(const SdeSystem& system, double delta, std::span<const double> t_grid) {
  ConditionReport report;
  report.threshold = energy_shell_level(system.c, delta);
  report.max_energy = -std::numeric_limits<double>::infinity();
  for (double T : t_grid) {
    try {
      report.max_energy = std::max(report.max_energy, energy_profile(solve_mptp(system, T), system).mean);
      ++report.evaluated;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoBracket) throw;
    }
  }
  if (report.evaluated == 0) throw Error(ErrorKind::NoBracket, "no shootable time in the grid");
  report.margin = report.threshold - report.max_energy;
  report.ok = report.margin > 0.0;
  return report;
}

}  // namespace omtube
