#include "omtube/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <sstream>

#include "omtube/error.hpp"
#include "omtube/parallel.hpp"

namespace omtube {

double el_rhs(const SdeSystem& system, double x) {
  const auto& d = system.drift;
  return d.db(x) * d.b(x) + 0.5 * system.c * system.c * d.d2b(x);
}

Polynomial el_rhs_polynomial(const SdeSystem& system) {
  const auto& d = system.drift;
  return d.polynomial() * d.first_derivative() + (0.5 * system.c * system.c) * d.second_derivative();
}

std::size_t default_rk4_steps(double T) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(T / 1e-3)));
}

namespace {

void check_shot_args(double T, std::size_t n_steps) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidInput, "transition time must be positive");
  if (n_steps < 16) throw Error(ErrorKind::InvalidInput, "shooting needs at least 16 RK4 steps");
}

struct State {
  double x, v;
};

inline State rk4_step(const Polynomial& rhs, State s, double h) {
  const double k1x = s.v, k1v = rhs(s.x);
  const double k2x = s.v + 0.5 * h * k1v, k2v = rhs(s.x + 0.5 * h * k1x);
  const double k3x = s.v + 0.5 * h * k2v, k3v = rhs(s.x + 0.5 * h * k2x);
  const double k4x = s.v + h * k3v, k4v = rhs(s.x + h * k3x);
  return {s.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x), s.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

double terminal(const Polynomial& rhs, double x0, double v0, double T, std::size_t n, double limit) {
  const double h = T / static_cast<double>(n);
  State s{x0, v0};
  for (std::size_t i = 0; i < n; ++i) {
    s = rk4_step(rhs, s, h);
    if (!(std::abs(s.x) <= limit)) return std::signbit(s.x) ? -std::numeric_limits<double>::infinity()
                                                             : std::numeric_limits<double>::infinity();
  }
  return s.x;
}

Shot trajectory(const Polynomial& rhs, double x0, double v0, double T, std::size_t n, double limit) {
  const double h = T / static_cast<double>(n);
  std::vector<double> xs, vs;
  xs.reserve(n + 1);
  vs.reserve(n + 1);
  State s{x0, v0};
  xs.push_back(s.x);
  vs.push_back(s.v);
  Shot shot;
  for (std::size_t i = 0; i < n; ++i) {
    s = rk4_step(rhs, s, h);
    if (!(std::abs(s.x) <= limit)) {
      shot.diverged = true;
      break;
    }
    xs.push_back(s.x);
    vs.push_back(s.v);
  }
  shot.terminal = shot.diverged ? (std::signbit(s.x) ? -std::numeric_limits<double>::infinity()
                                                     : std::numeric_limits<double>::infinity())
                                : s.x;
  shot.path = Path(0.0, h, std::move(xs));
  shot.velocity = std::move(vs);
  return shot;
}

double sup_abs_drift_on_domain(const SdeSystem& system) {
  return system.drift.polynomial().max_abs_on(system.domain_lo(), system.domain_hi());
}

}  // namespace

Shot shoot(const SdeSystem& system, double T, double v0, std::size_t n_steps) {
  check_shot_args(T, n_steps);
  return trajectory(el_rhs_polynomial(system), system.x0, v0, T, n_steps, 10.0 * system.l);
}

double shoot_terminal(const SdeSystem& system, double T, double v0, std::size_t n_steps) {
  check_shot_args(T, n_steps);
  return terminal(el_rhs_polynomial(system), system.x0, v0, T, n_steps, 10.0 * system.l);
}

EnergyProfile energy_profile(const ShootingSolution& solution, const SdeSystem& system) {
  const auto& p = solution.path;
  const auto energy_at = [&](std::size_t i) {
    return 0.5 * solution.velocity[i] * solution.velocity[i] + path_potential(system, p[i]);
  };
  const double e0 = energy_at(0);
  double sum = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = energy_at(i);
    sum += e;
    drift = std::max(drift, std::abs(e - e0));
  }
  return {sum / static_cast<double>(p.size()), drift};
}

namespace {

constexpr std::size_t kScanPoints = 2049;
constexpr double kWarp = 10.0;

// v0 candidates on [-V, V], dense near 0 and sparse near +/-V.
std::vector<double> velocity_scan(double V) {
  std::vector<double> v(kScanPoints);
  const double norm = std::sinh(kWarp);
  for (std::size_t j = 0; j < kScanPoints; ++j) {
    const double u = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(kScanPoints - 1);
    v[j] = V * std::sinh(kWarp * u) / norm;
  }
  return v;
}

struct Root {
  double v0;
  double residual;
};

std::optional<Root> bisect(const Polynomial& rhs, const SdeSystem& system, double T, std::size_t n, double limit,
                           double va, double fa, double vb, double tol) {
  Root best{va, std::abs(fa)};
  for (int it = 0; it < 200; ++it) {
    const double vm = 0.5 * (va + vb);
    if (vm <= va || vm >= vb) break;
    const double fm = terminal(rhs, system.x0, vm, T, n, limit) - system.xf;
    if (std::abs(fm) < best.residual) best = {vm, std::abs(fm)};
    if (std::abs(fm) <= 0.01 * tol) break;
    if (std::signbit(fm) == std::signbit(fa)) {
      va = vm;
      fa = fm;
    } else {
      vb = vm;
    }
  }
  if (best.residual <= tol) return best;
  return std::nullopt;
}

}  // namespace

ShootingSolution solve_mptp(const SdeSystem& system, double T, double tol, std::size_t n_steps) {
  if (n_steps == 0) n_steps = default_rk4_steps(T);
  check_shot_args(T, n_steps);
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "shooting tolerance must be positive");
  const auto rhs = el_rhs_polynomial(system);
  const double limit = 10.0 * system.l;
  const double V = 4.0 * (system.distance() / T + sup_abs_drift_on_domain(system));

  std::vector<Root> roots;
  if (rhs.degree() <= 1) {
    // Linear dynamics: psi(T) is affine in v0, so a secant step is exact up to roundoff.
    const double f0 = terminal(rhs, system.x0, 0.0, T, n_steps, limit) - system.xf;
    const double f1 = terminal(rhs, system.x0, 1.0, T, n_steps, limit) - system.xf;
    if (std::isfinite(f0) && std::isfinite(f1) && f1 != f0) {
      const double v = -f0 / (f1 - f0);
      const double fv = terminal(rhs, system.x0, v, T, n_steps, limit) - system.xf;
      const double w = v - fv / (f1 - f0);
      const double fw = terminal(rhs, system.x0, w, T, n_steps, limit) - system.xf;
      const Root r = std::abs(fw) < std::abs(fv) ? Root{w, std::abs(fw)} : Root{v, std::abs(fv)};
      if (r.residual <= tol && std::abs(r.v0) <= V) roots.push_back(r);
    }
  }

  const auto vs = roots.empty() ? velocity_scan(V) : std::vector<double>{};
  std::vector<double> fs(vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) fs[j] = terminal(rhs, system.x0, vs[j], T, n_steps, limit) - system.xf;

  for (std::size_t j = 0; j + 1 < vs.size(); ++j) {
    if (std::abs(fs[j]) <= tol) {
      roots.push_back({vs[j], std::abs(fs[j])});
      continue;
    }
    if (fs[j + 1] == 0.0 || std::signbit(fs[j]) == std::signbit(fs[j + 1])) continue;
    if (auto r = bisect(rhs, system, T, n_steps, limit, vs[j], fs[j], vs[j + 1], tol)) roots.push_back(*r);
  }
  if (!fs.empty() && std::abs(fs.back()) <= tol) roots.push_back({vs.back(), std::abs(fs.back())});
  if (roots.empty()) {
    std::ostringstream os;
    os << "no shooting velocity in [" << -V << ", " << V << "] connects x0 = " << system.x0 << " to xf = "
       << system.xf << " in T = " << T;
    throw Error(ErrorKind::NoBracket, os.str());
  }

  ShootingSolution best;
  bool have = false;
  for (const auto& r : roots) {
    Shot shot = trajectory(rhs, system.x0, r.v0, T, n_steps, limit);
    if (shot.diverged) continue;
    ShootingSolution sol;
    sol.om_action = om_action(shot.path, system);
    if (have && !(sol.om_action.total < best.om_action.total)) continue;
    sol.path = std::move(shot.path);
    sol.velocity = std::move(shot.velocity);
    sol.v0 = r.v0;
    sol.residual = std::abs(sol.path.back() - system.xf);
    sol.energy = 0.5 * r.v0 * r.v0 + path_potential(system, system.x0);
    best = std::move(sol);
    have = true;
  }
  if (!have) throw Error(ErrorKind::NoBracket, "all candidate shots diverged");
  best.root_count = roots.size();

  const auto profile = energy_profile(best, system);
  if (profile.drift > kEnergyDriftTol * std::max(1.0, std::abs(best.energy))) {
    std::ostringstream os;
    os << "energy drift " << profile.drift << " at T = " << T << " with " << n_steps << " steps";
    throw Error(ErrorKind::EnergyDrift, os.str());
  }
  return best;
}

double reparameterized_time(const ShootingSolution& solution, const SdeSystem& system) {
  const auto& p = solution.path;
  const auto& v = solution.velocity;
  const bool increasing = v.front() > 0.0;
  for (double vi : v) {
    if (vi == 0.0 || (vi > 0.0) != increasing) return std::numeric_limits<double>::quiet_NaN();
  }
  const double E = solution.energy;
  // Midpoint rule in x on each grid segment.
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double xm = 0.5 * (p[i] + p[i + 1]);
    const double kinetic = 2.0 * (E - path_potential(system, xm));
    if (!(kinetic > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    total += std::abs(p[i + 1] - p[i]) / std::sqrt(kinetic);
  }
  return total;
}

double energy_of_time(const SdeSystem& system, double T, double tol) {
  const auto sol = solve_mptp(system, T, tol);
  const auto profile = energy_profile(sol, system);
  const double t_re = reparameterized_time(sol, system);
  if (std::isfinite(t_re) && std::abs(t_re - T) > 0.01 * T) {
    std::ostringstream os;
    os << "travel-time integral " << t_re << " disagrees with T = " << T;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return profile.mean;
}

double discrete_om_action(const SdeSystem& system, std::span<const double> x, double dt) {
  const auto& d = system.drift;
  const std::size_t n = x.size();
  double kinetic = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double r = (x[i + 1] - x[i]) / dt - 0.5 * (d.b(x[i]) + d.b(x[i + 1]));
    kinetic += r * r;
  }
  double div = 0.5 * (d.db(x.front()) + d.db(x.back()));
  for (std::size_t i = 1; i + 1 < n; ++i) div += d.db(x[i]);
  return 0.5 * dt * kinetic + 0.5 * system.c * system.c * dt * div;
}

namespace {

// Gradient of discrete_om_action with respect to the interior nodes.
void discrete_gradient(const SdeSystem& system, const std::vector<double>& x, double dt, std::vector<double>& g) {
  const auto& d = system.drift;
  const std::size_t n = x.size();
  std::vector<double> r(n - 1), db(n);
  for (std::size_t i = 0; i < n; ++i) db[i] = d.db(x[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) r[i] = (x[i + 1] - x[i]) / dt - 0.5 * (d.b(x[i]) + d.b(x[i + 1]));
  const double half_c2 = 0.5 * system.c * system.c;
  g.assign(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    g[j] = dt * (r[j] * (-1.0 / dt - 0.5 * db[j]) + r[j - 1] * (1.0 / dt - 0.5 * db[j])) + half_c2 * dt * d.d2b(x[j]);
  }
}

double inf_norm(const std::vector<double>& g) {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

DirectMinimum direct_minimizer(const SdeSystem& system, double T, std::size_t n_nodes, int iters) {
  if (n_nodes < 32) throw Error(ErrorKind::InvalidInput, "direct minimizer needs at least 32 nodes");
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidInput, "transition time must be positive");
  const double dt = T / static_cast<double>(n_nodes - 1);
  std::vector<double> x = straight_line(system.x0, system.xf, T, n_nodes - 1).values();
  std::vector<double> g, g_new, x_new(x.size()), s(x.size()), y(x.size());

  double f = discrete_om_action(system, x, dt);
  discrete_gradient(system, x, dt, g);
  std::deque<double> recent{f};
  constexpr std::size_t kMemory = 10;
  double alpha = 0.25 * dt;  // ~ 1 / Lipschitz constant of the kinetic part

  for (int it = 0; it < iters; ++it) {
    const double grad_norm = inf_norm(g) / dt;
    if (grad_norm < 1e-8 * std::max(1.0, std::abs(f))) {
      return {Path(0.0, dt, x), f, grad_norm, it};
    }
    double gg = 0.0;
    for (double v : g) gg += v * v;
    const double f_ref = *std::max_element(recent.begin(), recent.end());
    double step = alpha;
    double f_new = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t j = 0; j < x.size(); ++j) x_new[j] = x[j] - step * g[j];
      f_new = discrete_om_action(system, x_new, dt);
      // Slack absorbs roundoff once decreases fall below machine resolution.
      if (f_new <= f_ref - 1e-4 * step * gg + 1e-15 * std::abs(f_ref)) break;
      step *= 0.5;
    }
    discrete_gradient(system, x_new, dt, g_new);
    double sy = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      s[j] = x_new[j] - x[j];
      y[j] = g_new[j] - g[j];
      sy += s[j] * y[j];
      ss += s[j] * s[j];
    }
    alpha = sy > 0.0 ? ss / sy : 2.0 * step;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    recent.push_back(f);
    if (recent.size() > kMemory) recent.pop_front();
  }
  std::ostringstream os;
  os << "direct minimizer did not converge in " << iters << " iterations (grad norm " << inf_norm(g) / dt << ")";
  throw Error(ErrorKind::NoConvergence, os.str());
}

std::vector<ActionRow> action_vs_time(const SdeSystem& system, double delta, std::span<const double> T_grid,
                                      unsigned workers) {
  std::vector<ActionRow> rows(T_grid.size());
  parallel_for(T_grid.size(), workers, [&](std::size_t i) {
    auto& row = rows[i];
    row.T = T_grid[i];
    try {
      const auto sol = solve_mptp(system, row.T);
      row.s_om = sol.om_action.total;
      row.s_mom = row.s_om + tube_penalty(system.c, delta, row.T);
      row.energy = energy_profile(sol, system).mean;
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  return rows;
}

RegularityReport regularity_diagnostics(const SdeSystem& system, std::span<const double> T_grid) {
  RegularityReport report;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double T : T_grid) {
    try {
      const auto sol = solve_mptp(system, T);
      for (double v : sol.velocity) report.max_speed = std::max(report.max_speed, std::abs(v));
      for (std::size_t i = 0; i < sol.path.size(); ++i) {
        report.max_acceleration = std::max(report.max_acceleration, std::abs(el_rhs(system, sol.path[i])));
      }
      lo = std::min(lo, sol.path.min_value());
      hi = std::max(hi, sol.path.max_value());
      ++report.solved;
    } catch (const Error&) {
      ++report.failed;
    }
  }
  if (report.solved > 0) report.acceleration_bound = el_rhs_polynomial(system).max_abs_on(lo, hi);
  return report;
}

}  // namespace omtube
