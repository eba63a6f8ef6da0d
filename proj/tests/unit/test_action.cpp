#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "omtube/action.hpp"
#include "omtube/error.hpp"
#include "omtube/variational.hpp"

using namespace omtube;

namespace {

Path sampled(double T, std::size_t n, double (*f)(double)) {
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = f(T * static_cast<double>(i) / static_cast<double>(n));
  return Path(0.0, T / static_cast<double>(n), std::move(v));
}

double smooth(double t) { return -1.0 + 2.0 * std::sin(0.5 * std::numbers::pi * t) + 0.1 * t * (1.0 - t); }
double quadratic(double t) { return -1.0 + 0.5 * t + 1.5 * t * t; }

}  // namespace

TEST_SUITE("action") {
  TEST_CASE("straight line under zero drift") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    const auto v = kappa_action(straight_line(0.0, 1.0, 2.0, 200), bm, 0.5);
    CHECK(v.kinetic_part == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(v.total == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(v.divergence_part == 0.0);
  }

  TEST_CASE("constant path at the left well") {
    const auto dw = double_well_system();
    for (double T : {0.5, 1.0, 3.0}) {
      const Path rest(0.0, T / 100, std::vector<double>(101, -1.0));
      CHECK(kappa_action(rest, dw, 0.5).total == doctest::Approx(-T).epsilon(1e-12));
    }
  }

  TEST_CASE("om_action equals kappa_action at one half") {
    const auto dw = double_well_system();
    const auto p = sampled(1.0, 300, smooth);
    const auto a = om_action(p, dw);
    const auto b = kappa_action(p, dw, 0.5);
    CHECK(a.total == b.total);
    CHECK(a.kinetic_part == b.kinetic_part);
    CHECK(a.divergence_part == b.divergence_part);
  }

  TEST_CASE("straight line OM action under zero drift") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    for (double T : {0.3, 1.0, 4.0}) CHECK(om_action(straight_line(0.0, 1.0, T, 64), bm).total == doctest::Approx(1.0 / (2.0 * T)));
  }

  TEST_CASE("shooting path beats the straight line") {
    const auto dw = double_well_system();
    const auto sol = solve_mptp(dw, 1.0);
    const auto line = straight_line(-1.0, 1.0, 1.0, sol.path.steps());
    CHECK(om_action(sol.path, dw).total <= om_action(line, dw).total + 1e-9);
  }

  TEST_CASE("modified action adds the tube penalty") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (double T : {0.2, 1.0 / std::numbers::pi, 0.7, 2.0}) {
      const auto v = modified_om_action(straight_line(0.0, 1.0, T, 128), bm, 0.5);
      CHECK(v.total == doctest::Approx(1.0 / (2.0 * T) + pi2 * T / 2.0).epsilon(1e-12));
      CHECK(v.tube_penalty == doctest::Approx(pi2 * T / 2.0));
    }
    CHECK(tube_penalty(2.0, 0.5, 1.0) == doctest::Approx(16.0 * pi2 / 2.0));
  }

  TEST_CASE("modified action increases beyond the closed-form minimizer") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    double prev = -std::numeric_limits<double>::infinity();
    for (double T = 0.33; T < 3.0; T += 0.1) {
      const double v = modified_om_action(straight_line(0.0, 1.0, T, 64), bm, 0.5).total;
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("modified action without a tube reduces to OM") {
    const auto dw = double_well_system();
    const auto p = sampled(1.0, 200, smooth);
    CHECK(modified_om_action(p, dw, std::numeric_limits<double>::infinity()).total == om_action(p, dw).total);
    CHECK(std::abs(modified_om_action(p, dw, 1e8).total - om_action(p, dw).total) < 1e-12);
    CHECK_THROWS_AS(modified_om_action(p, dw, 0.0), Error);
  }

  TEST_CASE("FW action") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    CHECK(fw_action(straight_line(0.0, 1.0, 1.0, 50), bm) == doctest::Approx(1.0).epsilon(1e-12));

    // Exact relaxation x(t) = x1 e^{-theta t} along an OU flow.
    SdeSystem ou;
    ou.drift = DriftModel::ornstein_uhlenbeck(1.0);
    ou.x0 = 0.0;
    ou.xf = 0.5;
    const std::size_t n = 4000;
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) v[i] = 2.0 * std::exp(-static_cast<double>(i) / n);
    CHECK(fw_action(Path(0.0, 1.0 / n, std::move(v)), ou) < 1e-10);
  }

  TEST_CASE("small-noise limit of the modified action") {
    auto dw = double_well_system();
    // A path that lingers near the wells, so c^2 int b' dominates the c^4 penalty.
    const auto psi = solve_mptp(dw, 3.0).path;
    std::vector<double> ratios;
    double prev = 0.0;
    for (double c : {0.2, 0.1, 0.05, 0.025}) {
      dw.c = c;
      const double gap = modified_om_action(psi, dw, 0.5).total - 0.5 * fw_action(psi, dw);
      if (prev != 0.0) ratios.push_back(prev / gap);
      prev = gap;
    }
    REQUIRE(ratios.size() == 3);
    CHECK(ratios[0] < ratios[1]);
    CHECK(ratios[1] < ratios[2]);
    CHECK(ratios[2] == doctest::Approx(4.0).epsilon(0.01));
  }

  TEST_CASE("additivity in time at a shared node") {
    const auto dw = double_well_system();
    const auto p = sampled(1.0, 200, quadratic);
    std::vector<double> left(p.values().begin(), p.values().begin() + 101);
    std::vector<double> right(p.values().begin() + 100, p.values().end());
    const double whole = om_action(p, dw).total;
    const double parts = om_action(Path(0.0, p.dt(), left), dw).total + om_action(Path(0.5, p.dt(), right), dw).total;
    CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
  }

  TEST_CASE("second-order convergence in the grid spacing") {
    const auto dw = double_well_system();
    const double a = om_action(sampled(1.0, 100, smooth), dw).total;
    const double b = om_action(sampled(1.0, 200, smooth), dw).total;
    const double c = om_action(sampled(1.0, 400, smooth), dw).total;
    CHECK((a - b) / (b - c) == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("kappa action is affine in kappa") {
    const auto dw = double_well_system(0.7);
    const auto p = sampled(1.3, 260, smooth);
    const double s0 = kappa_action(p, dw, 0.0).total;
    const double sh = kappa_action(p, dw, 0.5).total;
    const double s1 = kappa_action(p, dw, 1.0).total;
    CHECK(s1 - s0 == doctest::Approx(2.0 * (sh - s0)).epsilon(1e-12));
    // slope c^2 int b'(psi) dt, trapezoid on the same grid
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) integral += 0.5 * p.dt() * (dw.drift.db(p[i]) + dw.drift.db(p[i + 1]));
    CHECK(s1 - s0 == doctest::Approx(dw.c * dw.c * integral).epsilon(1e-12));
  }

  TEST_CASE("velocity and short paths") {
    const auto p = sampled(1.0, 50, quadratic);
    const auto v = path_velocity(p);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(v[i] == doctest::Approx(0.5 + 3.0 * p.time(i)).epsilon(1e-10));
    try {
      om_action(Path(0.0, 0.1, {0.0, 1.0}), brownian_system());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PathTooShort);
    }
  }
}
