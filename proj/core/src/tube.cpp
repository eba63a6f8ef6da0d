#include "omtube/tube.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "omtube/error.hpp"
#include "omtube/optimize.hpp"
#include "omtube/parallel.hpp"

namespace omtube {

namespace {

constexpr double kPi = std::numbers::pi;

double series_exponent(double c, double delta, double T) { return kPi * kPi * c * c * T / (8.0 * delta * delta); }

// Image-charge form, accurate when delta / (c sqrt(T)) is large.
double image_sum(double y) {
  const double s = y / std::numbers::sqrt2;
  double p = std::erf(s);
  for (int k = 1; k < 1000; ++k) {
    const double term = std::erfc((2 * k - 1) * s) - std::erfc((2 * k + 1) * s);
    p += (k % 2 ? -term : term);
    if (std::abs(term) < 1e-18) break;
  }
  return p;
}

}  // namespace

double brownian_tube_probability(double c, double delta, double T, double tol) {
  if (!(c > 0.0) || !(delta > 0.0) || !(T >= 0.0) || !(tol > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "tube probability needs c > 0, delta > 0, T >= 0, tol > 0");
  }
  if (T == 0.0) return 1.0;
  const double a = series_exponent(c, delta, T);
  double p = 0.0;
  if (a < 0.05) {
    p = image_sum(delta / (c * std::sqrt(T)));
  } else {
    for (int n = 0;; ++n) {
      const double m = 2.0 * n + 1.0;
      const double term = 4.0 / (m * kPi) * std::exp(-m * m * a);
      p += (n % 2 ? -term : term);
      const double m_next = m + 2.0;
      if (4.0 / (m_next * kPi) * std::exp(-m_next * m_next * a) < tol) break;
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

double brownian_tube_one_term(double c, double delta, double T) {
  return 4.0 / kPi * std::exp(-series_exponent(c, delta, T));
}

double mu1(double c, double delta, double t) {
  const double a = series_exponent(c, delta, t);
  return 4.0 / kPi * std::exp(-a) - 4.0 / (3.0 * kPi) * std::exp(-9.0 * a);
}

TubeEstimate empirical_tube_probability(const SdeSystem& system, const Path& psi, double delta,
                                        const SimConfig& config, std::size_t n, TubeMonitoring monitoring,
                                        unsigned workers) {
  validate_sim_config(config);
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "tube radius must be positive");
  if (n == 0) throw Error(ErrorKind::InvalidInput, "need at least one path");
  if (psi.steps() == 0) throw Error(ErrorKind::IncompatibleGrids, "reference path needs at least one step");
  const double ratio = psi.dt() / config.dt;
  const double sub = std::round(ratio);
  if (sub < 1.0 || std::abs(ratio - sub) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "reference dt " << psi.dt() << " is not an integer multiple of simulation dt " << config.dt;
    throw Error(ErrorKind::IncompatibleGrids, os.str());
  }
  if (!(std::abs(psi.front() - system.x0) < delta)) {
    throw Error(ErrorKind::InvalidInput, "reference path must start within delta of x0");
  }
  const auto per_step = static_cast<std::size_t>(sub);
  const std::size_t steps = psi.steps() * per_step;

  // Reference values on the simulation grid.
  std::vector<double> ref(steps + 1);
  for (std::size_t j = 0; j < psi.steps(); ++j) {
    for (std::size_t k = 0; k < per_step; ++k) {
      const double w = static_cast<double>(k) / static_cast<double>(per_step);
      ref[j * per_step + k] = (1.0 - w) * psi[j] + w * psi[j + 1];
    }
  }
  ref[steps] = psi.back();

  const double var_step = system.c * system.c * config.dt;
  const bool bridge = monitoring == TubeMonitoring::BrownianBridge && var_step > 0.0;
  // Whole-line absorbing boundary: the tube test is the only stopping rule.
  const double unbounded = std::numeric_limits<double>::infinity();
  std::vector<double> weights(n, 0.0);
  parallel_for(n, workers, [&](std::size_t i) {
    PathStepper stepper(system, config, path_seed(config, i), unbounded);
    double prev = system.x0 - ref[0];
    double w = 1.0;
    for (std::size_t k = 1; k <= steps; ++k) {
      const double d = stepper.advance() - ref[k];
      if (!(std::abs(d) < delta)) return;
      if (bridge) {
        const double up = std::exp(-2.0 * (delta - prev) * (delta - d) / var_step);
        const double down = std::exp(-2.0 * (delta + prev) * (delta + d) / var_step);
        w *= std::max(0.0, 1.0 - up - down);
        if (w == 0.0) return;
      }
      prev = d;
    }
    weights[i] = w;
  });

  double sum = 0.0, sum_sq = 0.0;
  for (double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  const auto m = static_cast<double>(n);
  const double mean = sum / m;
  const double var = n > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
  return {mean, kZ99 * std::sqrt(var / m), n};
}

namespace {

using Real = long double;
using Kronrod = boost::math::quadrature::gauss_kronrod<Real, 31>;
constexpr Real kQuadTol = 1e-10L;
constexpr double kRequiredRelTol = 1e-8;
constexpr int kPanels = 200;
constexpr unsigned kMaxDepth = 18;

class ExitTimeSolver {
 public:
  ExitTimeSolver(const SdeSystem& system, double halfwidth)
      : lo_(system.x0 - halfwidth), hi_(system.x0 + halfwidth), c2_(system.c * system.c) {
    // phi(x) = -2 U(x) / c^2 with U measured from x0.
    const auto& prim = system.drift.polynomial().antiderivative();
    const double shift = prim(system.x0);
    phi_ = (-2.0 / c2_) * (prim + Polynomial({-shift}));
    phi_max_ = max_on(phi_, lo_, hi_);
    width_ = (hi_ - lo_) / kPanels;

    // Cumulative integral of exp(-phi) at panel edges.
    edge_inv_.assign(kPanels + 1, 0.0L);
    for (int k = 0; k < kPanels; ++k) {
      edge_inv_[k + 1] = edge_inv_[k] + integrate([this](Real z) { return inv_scale(z); }, edge(k), edge(k + 1));
    }
  }

  double solve(double x) {
    // u(x) = (2/c^2) [R(x) int_x^b s Phi - (1 - R(x)) int_a^x s Phi],
    // s = exp(phi), Phi(y) = int_a^y exp(-phi), R(x) = int_a^x s / int_a^b s.
    auto s_phi = [this](Real y) { return scale(y) * inv_cumulative(static_cast<double>(y)); };
    auto s_only = [this](Real y) { return scale_normalized(y); };
    const Real left_s = panelwise(s_only, lo_, x);
    const Real right_s = panelwise(s_only, x, hi_);
    const Real r = left_s / (left_s + right_s);
    const Real left = panelwise(s_phi, lo_, x);
    const Real right = panelwise(s_phi, x, hi_);
    const Real u = (2.0L / c2_) * (r * right - (1.0L - r) * left);
    return static_cast<double>(u);
  }

 private:
  static double max_on(const Polynomial& p, double a, double b) {
    double best = std::max(p(a), p(b));
    for (int i = 1; i < 2048; ++i) best = std::max(best, p(a + (b - a) * i / 2048.0));
    for (double r : p.derivative().roots_in(a, b)) best = std::max(best, p(r));
    return best;
  }

  double edge(int k) const { return k == kPanels ? hi_ : lo_ + k * width_; }

  Real scale(Real x) const { return std::exp(static_cast<Real>(phi_(static_cast<double>(x)))); }
  Real scale_normalized(Real x) const { return std::exp(static_cast<Real>(phi_(static_cast<double>(x)) - phi_max_)); }
  Real inv_scale(Real x) const { return std::exp(-static_cast<Real>(phi_(static_cast<double>(x)))); }

  Real inv_cumulative(double y) const {
    const int k = std::clamp(static_cast<int>((y - lo_) / width_), 0, kPanels - 1);
    const double a = edge(k);
    if (y <= a) return edge_inv_[k];
    return edge_inv_[k] + integrate([this](Real z) { return inv_scale(z); }, a, y);
  }

  template <typename F>
  Real panelwise(F&& f, double a, double b) const {
    Real total = 0.0L;
    if (!(b > a)) return total;
    const int k_start = std::clamp(static_cast<int>((a - lo_) / width_), 0, kPanels - 1);
    for (int k = k_start; k < kPanels; ++k) {
      const double pa = std::max(a, edge(k));
      const double pb = std::min(b, edge(k + 1));
      if (pb > pa) total += integrate(f, pa, pb);
      if (edge(k + 1) >= b) break;
    }
    return total;
  }

  template <typename F>
  static Real integrate(F&& f, double a, double b) {
    Real error = 0.0L, l1 = 0.0L;
    // Boost reports leaf error estimates in reference-interval units, so the
    // map onto [-1, 1] is done here to keep error and l1 comparable.
    const Real mid = 0.5L * (static_cast<Real>(a) + static_cast<Real>(b));
    const Real half = 0.5L * (static_cast<Real>(b) - static_cast<Real>(a));
    auto g = [&](Real u) { return half * f(mid + half * u); };
    const Real value = Kronrod::integrate(g, -1.0L, 1.0L, kMaxDepth, kQuadTol, &error, &l1);
    if (!(error <= kRequiredRelTol * l1) || !std::isfinite(static_cast<double>(value))) {
      std::ostringstream os;
      os << "adaptive quadrature on [" << a << ", " << b << "] reached error " << error
         << " against magnitude " << l1 << " (value " << value << ")";
      throw Error(ErrorKind::QuadratureFailure, os.str());
    }
    return value;
  }

  double lo_, hi_, c2_;
  Polynomial phi_;
  double phi_max_ = 0.0;
  double width_ = 0.0;
  std::vector<Real> edge_inv_;
};

}  // namespace

double mean_exit_time_bvp(const SdeSystem& system, double halfwidth, double x_eval) {
  if (!(system.c > 0.0)) throw Error(ErrorKind::BadNoise, "noise intensity c must be positive");
  if (!(halfwidth > 0.0)) throw Error(ErrorKind::InvalidInput, "half-width must be positive");
  if (!(std::abs(x_eval - system.x0) < halfwidth)) {
    throw Error(ErrorKind::InvalidInput, "evaluation point must lie inside the interval");
  }
  return ExitTimeSolver(system, halfwidth).solve(x_eval);
}

double markov_upper_bound(double mean_exit_enlarged, double T) {
  if (!(mean_exit_enlarged > 0.0) || !(T > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "Markov bound needs positive mean exit time and T");
  }
  return std::min(1.0, mean_exit_enlarged / T);
}

BoundConstants tube_region_constants(const SdeSystem& system, const Path& psi, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "tube radius must be positive");
  const auto& b = system.drift.polynomial();
  const double lo = psi.min_value() - delta;
  const double hi = psi.max_value() + delta;
  const auto prim = b.antiderivative();
  BoundConstants k;
  k.h0 = (prim + Polynomial({-prim(system.xf)})).max_abs_on(system.xf - delta, system.xf + delta);
  k.h1 = (b * system.drift.first_derivative()).max_abs_on(lo, hi);
  k.h2 = system.drift.second_derivative().max_abs_on(lo, hi);
  return k;
}

BoundConstants lower_bound_constants(const SdeSystem& system, TubeSpec tube) {
  const double delta = tube.delta;
  const double c2 = system.c * system.c;
  const double span = system.xf - system.x0;
  const double dist = std::abs(span);
  BoundConstants k = tube_region_constants(system, straight_line(system.x0, system.xf, 1.0, 1), delta);

  // Line integrals over phi_1(t) = x0 + t (xf - x0), t in [0, 1], done exactly.
  const auto& b = system.drift.polynomial();
  const auto prim = b.antiderivative();
  const auto prim_sq = (b * b).antiderivative();
  const double line_b = (prim(system.xf) - prim(system.x0)) / span;
  const double line_b2 = (prim_sq(system.xf) - prim_sq(system.x0)) / span;

  k.c0 = std::exp(-k.h0 / c2);
  k.c1 = (k.h1 + system.kappa * c2 * k.h2) * delta / c2;
  k.k0 = k.c0 * std::exp(span / c2 * line_b);
  k.k1 = (span * span + 2.0 * dist * delta) / (2.0 * c2);
  k.k2 = 0.5 * line_b2 / c2 + k.c1;
  return k;
}

namespace {

double log_theta(double t, const BoundConstants& k, double c, double delta) {
  const double m = mu1(c, delta, t);
  if (!(m > 0.0) || !(k.k0 > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(k.k0) - k.k1 / t - k.k2 * t + std::log(m);
}

}  // namespace

double theta_bound(double t, const BoundConstants& constants, double c, double delta) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "theta needs t > 0");
  return std::exp(log_theta(t, constants, c, delta));
}

ThetaMaximum maximize_theta(const BoundConstants& constants, double c, double delta) {
  const auto grid = geometric_grid(1e-4, 1e3, 400);
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = log_theta(grid[i], constants, c, delta);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  auto neg = [&](double t) { return -log_theta(t, constants, c, delta); };
  const auto m = golden_section_minimize(neg, a, b, 1e-10 * b);
  if (-m.fx > best_val) return {m.x, std::exp(-m.fx)};
  return {grid[best], std::exp(best_val)};
}

}  // namespace omtube
