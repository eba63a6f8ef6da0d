#include <doctest.h>

#include <cmath>
#include <numbers>

#include "omtube/action.hpp"
#include "omtube/error.hpp"
#include "omtube/optimize.hpp"
#include "omtube/transition_time.hpp"
#include "omtube/variational.hpp"

using namespace omtube;

TEST_SUITE("transition_time") {
  TEST_CASE("closed form for zero drift") {
    CHECK(brownian_mptt(0.0, 1.0, 0.5, 1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    for (double c : {0.25, 0.5, 2.0}) {
      CHECK(brownian_mptt(0.0, 1.0, 0.5, c) * c * c == doctest::Approx(1.0 / std::numbers::pi));
    }
    CHECK(brownian_mptt(0.0, 1.0, 0.6, 1.0) == doctest::Approx(2.0 * brownian_mptt(0.0, 1.0, 0.3, 1.0)));
    CHECK(brownian_mptt(0.0, 1.0, 1e-6, 1.0) < 1e-5);
    CHECK(brownian_mptt(0.0, 1.0, 0.5, 0.01) > 3000.0);
    CHECK(brownian_mptt(2.0, -1.0, 0.5, 1.0) == doctest::Approx(3.0 / std::numbers::pi));
  }

  TEST_CASE("action minimization reproduces the closed form") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    const auto r = minimize_modified_action(bm, TubeSpec{0.5}, 0.05, 2.0, 1e-7, 1);
    CHECK(r.t_star == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-4));
    CHECK(r.s_mom == doctest::Approx(std::numbers::pi).epsilon(1e-6));
    CHECK(r.method == MpttMethod::ActionMinimization);
  }

  TEST_CASE("monotone modified action has no interior minimum") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    try {
      minimize_modified_action(bm, TubeSpec{0.5}, 1.0, 3.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoInteriorMinimum);
    }
  }

  TEST_CASE("double-well optimal time grows with the tube size") {
    const auto dw = double_well_system();
    double prev = 0.0;
    for (double delta : {0.3, 0.5, 0.8}) {
      const auto r = minimize_modified_action(dw, TubeSpec{delta}, 0.3, 1.5);
      CHECK(r.t_star > prev);
      prev = r.t_star;
    }
  }

  TEST_CASE("stationarity at the optimum") {
    const auto dw = double_well_system();
    const double delta = 0.5;
    const auto r = minimize_modified_action(dw, TubeSpec{delta}, 0.3, 1.5, 1e-8);
    const double h = 1e-3;
    auto s = [&](double T) { return solve_mptp(dw, T).om_action.total + tube_penalty(1.0, delta, T); };
    const double derivative = (s(r.t_star + h) - s(r.t_star - h)) / (2 * h);
    CHECK(std::abs(derivative) < 1e-3 * energy_shell_level(1.0, delta));
  }

  TEST_CASE("energy shell agrees with action minimization") {
    const auto dw = double_well_system();
    const double shell = energy_shell_time(dw, TubeSpec{0.5}, 0.3, 1.5);
    const auto r = minimize_modified_action(dw, TubeSpec{0.5}, 0.3, 1.5, 1e-8);
    CHECK(shell == doctest::Approx(r.t_star).epsilon(1e-3));
    CHECK(energy_of_time(dw, shell) == doctest::Approx(energy_shell_level(1.0, 0.5)).epsilon(1e-6));
  }

  TEST_CASE("energy shell without a crossing") {
    const auto dw = double_well_system();
    try {
      energy_shell_time(dw, TubeSpec{0.5}, 1.0, 1.5);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoSignChange);
    }
  }

  TEST_CASE("energy shell over a non-monotone range never returns a silent root") {
    // E(T) dips near T = 1.6 and rises again, so a low shell level is crossed twice.
    const auto dw = double_well_system();
    const double delta = std::numbers::pi / std::sqrt(8.0 * 1.1);
    try {
      const double t = energy_shell_time(dw, TubeSpec{delta}, 1.2, 2.2);
      FAIL("unexpected root " << t);
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::MultipleRoots || e.kind() == ErrorKind::NoSignChange));
    }
  }

  TEST_CASE("zero-drift bounds bracket the closed form") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    const auto b = transition_time_bounds(bm, TubeSpec{0.5});
    CHECK(b.rho > 0.0);
    CHECK(b.rho < 1.0 / std::numbers::pi);
    CHECK(b.t_upper > 1.0 / std::numbers::pi);
    CHECK(std::isfinite(b.t_upper));
    CHECK(b.mean_exit == doctest::Approx(30.25).epsilon(1e-8));
    CHECK_FALSE(b.rho_degenerate);
  }

  TEST_CASE("double-well bounds bracket the optimal time") {
    const auto dw = double_well_system();
    const auto b = transition_time_bounds(dw, TubeSpec{0.5});
    const auto r = minimize_modified_action(dw, TubeSpec{0.5}, 0.3, 1.5);
    CHECK(b.rho <= r.t_star);
    CHECK(r.t_star <= b.t_upper);
  }

  TEST_CASE("lower bound shrinks as the tube widens toward the distance") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    double prev = transition_time_bounds(bm, TubeSpec{0.3}).rho;
    for (double delta : {0.5, 0.7, 0.9}) {
      const double rho = transition_time_bounds(bm, TubeSpec{delta}).rho;
      CHECK(rho < prev);
      prev = rho;
    }
  }

  TEST_CASE("condition check") {
    const auto bm = brownian_system(1.0, 0.0, 1.0);
    const auto grid = geometric_grid(5.0, 20.0, 6);
    CHECK(condition_check(bm, 0.5, grid).ok);
    CHECK(condition_check(bm, 2.0, grid).ok);
    CHECK_FALSE(condition_check(bm, 50.0, grid).ok);

    const auto dw = double_well_system();
    const auto dgrid = uniform_grid(0.3, 1.5, 7);
    const auto r = condition_check(dw, 0.5, dgrid);
    CHECK(r.evaluated == 7);
    CHECK(r.threshold == doctest::Approx(energy_shell_level(1.0, 0.5)));
    CHECK(r.margin == doctest::Approx(r.threshold - r.max_energy));
    CHECK_FALSE(condition_check(dw, 1e6, dgrid).ok);
  }

  TEST_CASE("method names") {
    CHECK(to_string(MpttMethod::ClosedForm) == "closed");
    CHECK(to_string(MpttMethod::ActionMinimization) == "action");
    CHECK(to_string(MpttMethod::EnergyShell) == "shell");
  }
}
