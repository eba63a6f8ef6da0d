#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "omtube/error.hpp"
#include "omtube/rng.hpp"
#include "omtube/simulate.hpp"
#include "omtube/tube.hpp"

using namespace omtube;

namespace {

SimConfig coarse(double dt, double horizon, std::uint64_t seed = 1) {
  SimConfig c;
  c.dt = dt;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("single explicit and implicit steps") {
    const auto bm = brownian_system();
    CHECK(step(bm, 0.0, 0.1, SimConfig{}) == doctest::Approx(0.1));

    const auto dw = double_well_system();
    CHECK(step(dw, -1.0, 0.0, SimConfig{}) == -1.0);

    SdeSystem ou;
    ou.drift = DriftModel::ornstein_uhlenbeck(1.0);
    ou.x0 = 0.0;
    SimConfig implicit;
    implicit.dt = 0.1;
    implicit.scheme_kappa = 1.0;
    CHECK(step(ou, 1.0, 0.0, implicit) == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
  }

  TEST_CASE("theta scheme interpolates explicit and implicit linear steps") {
    SdeSystem ou;
    ou.drift = DriftModel::ornstein_uhlenbeck(2.0);
    ou.x0 = 0.0;
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.scheme_kappa = 0.5;
    // x = 1 - 0.5*2*0.05 - 0.5*2*0.05*x  =>  x = 0.95 / 1.05
    CHECK(step(ou, 1.0, 0.0, cfg) == doctest::Approx(0.95 / 1.05).epsilon(1e-12));
  }

  TEST_CASE("path length and starting value") {
    const auto r = simulate_path(brownian_system(), coarse(0.5, 1.0), 7);
    CHECK(r.path.size() == 3);
    CHECK(r.path[0] == 0.0);
    CHECK_FALSE(r.exited);
  }

  TEST_CASE("zero noise keeps the double well at its equilibrium") {
    auto s = double_well_system();
    s.c = 0.0;
    const auto r = simulate_path(s, coarse(1e-3, 1.0), 3);
    for (double v : r.path.values()) CHECK(v == -1.0);
  }

  TEST_CASE("same seed gives a bit-identical path") {
    const auto cfg = coarse(1e-4, 0.2);
    const auto a = simulate_path(double_well_system(), cfg, path_seed(cfg, 42));
    const auto b = simulate_path(double_well_system(), cfg, path_seed(cfg, 42));
    CHECK(a.path.values() == b.path.values());
    const auto c = simulate_path(double_well_system(), cfg, path_seed(cfg, 43));
    CHECK(a.path.values() != c.path.values());
  }

  TEST_CASE("seed mixing separates nearby master seeds and indices") {
    CHECK(mix64(1, 0) != mix64(1, 1));
    CHECK(mix64(1, 0) != mix64(2, 0));
    CHECK(mix64(1, 1) != mix64(2, 0));
  }

  TEST_CASE("first grid crossing") {
    const Path ramp(0.0, 0.2, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
    const auto s = brownian_system(1.0, 0.0, 0.6);
    REQUIRE(first_transition_time(ramp, s).has_value());
    CHECK(*first_transition_time(ramp, s) == doctest::Approx(0.6));
    CHECK(*first_transition_index(ramp, s) == 3);

    const Path flat(0.0, 0.1, std::vector<double>(11, 0.0));
    CHECK_FALSE(first_transition_time(flat, s).has_value());

    const Path downward(0.0, 0.1, {1.0, 0.5, -0.2});
    const auto down = brownian_system(1.0, 1.0, 0.0);
    CHECK(*first_transition_time(downward, down) == doctest::Approx(0.2));
  }

  TEST_CASE("transition time is stable under prefix extension") {
    const auto s = double_well_system();
    const auto cfg = coarse(1e-3, 5.0);
    for (std::uint64_t i = 0; i < 40; ++i) {
      const auto r = simulate_path(s, cfg, path_seed(cfg, i));
      std::optional<double> previous;
      for (std::size_t n = 100; n < r.path.size(); n += 250) {
        const auto t = first_transition_time(r.path.prefix(n), s);
        if (previous) {
          REQUIRE(t.has_value());
          CHECK(*t == *previous);
        }
        if (t) previous = t;
      }
    }
  }

  TEST_CASE("absorbed paths stay inside the domain until the last sample") {
    auto s = brownian_system(1.0, 0.0, 0.1);
    s.l = 0.3;
    const auto cfg = coarse(1e-3, 10.0);
    int exits = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto r = simulate_path(s, cfg, path_seed(cfg, i));
      const auto& v = r.path.values();
      for (std::size_t k = 0; k + 1 < v.size(); ++k) CHECK(s.in_domain(v[k]));
      if (r.exited) {
        ++exits;
        CHECK_FALSE(s.in_domain(v.back()));
      }
    }
    CHECK(exits == 20);
  }

  TEST_CASE("zero-drift increments are Gaussian with variance c^2 dt") {
    auto s = brownian_system(1.7, 0.0, 1.0);
    s.l = 1e9;
    const auto cfg = coarse(1e-2, 1000.0, 99);
    const auto r = simulate_path(s, cfg, path_seed(cfg, 0));
    std::vector<double> inc;
    inc.reserve(r.path.steps());
    for (std::size_t k = 1; k < r.path.size(); ++k) inc.push_back(r.path[k] - r.path[k - 1]);
    REQUIRE(inc.size() == 100000);
    const double n = static_cast<double>(inc.size());
    const double sd = s.c * std::sqrt(cfg.dt);
    const double mean = std::accumulate(inc.begin(), inc.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : inc) ss += (d - mean) * (d - mean);
    const double var = ss / (n - 1.0);
    // 1% two-sided tests on the mean and on the variance (chi-square, normal approx)
    CHECK(std::abs(mean) / (sd / std::sqrt(n)) < 2.576);
    CHECK(std::abs(var / (sd * sd) - 1.0) / std::sqrt(2.0 / (n - 1.0)) < 2.576);
    // Kolmogorov-Smirnov at 1%
    std::sort(inc.begin(), inc.end());
    double d_max = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
      const double f = normal_cdf(inc[i] / sd);
      d_max = std::max({d_max, (i + 1) / n - f, f - i / n});
    }
    CHECK(d_max * std::sqrt(n) < 1.628);
  }

  TEST_CASE("ensemble partitions and reproducibility across worker counts") {
    const auto cfg = coarse(1e-3, 1.5, 5);
    const auto one = simulate_ensemble(double_well_system(), cfg, 400, 1);
    const auto many = simulate_ensemble(double_well_system(), cfg, 400, 8);
    CHECK(one == many);
    CHECK(one.transitions.size() + one.n_censored_exit + one.n_no_transition == 400);
    for (const auto& t : one.transitions) {
      CHECK(t.T > 0.0);
      CHECK(t.T <= cfg.horizon + 1e-12);
    }
    CHECK(std::is_sorted(one.transitions.begin(), one.transitions.end(),
                         [](const auto& a, const auto& b) { return a.path_index < b.path_index; }));

    const auto single = simulate_ensemble(brownian_system(), coarse(1e-3, 0.5), 1);
    CHECK(single.n_paths == 1);
    CHECK(single.transitions.size() + single.n_censored_exit + single.n_no_transition == 1);
  }

  TEST_CASE("invalid simulation settings are rejected") {
    CHECK_THROWS_AS(simulate_path(brownian_system(), coarse(0.0, 1.0), 1), Error);
    CHECK_THROWS_AS(simulate_path(brownian_system(), coarse(0.1, 0.01), 1), Error);
    SimConfig bad;
    bad.scheme_kappa = 2.0;
    CHECK_THROWS_AS(validate_sim_config(bad), Error);
  }

  TEST_CASE("mean exit time of Brownian motion") {
    auto s = brownian_system(1.0, 0.0, 1.0);
    const auto cfg = coarse(1e-3, 40.0, 11);
    const auto e = exit_time_mc(s, 2.0, cfg, 4000);
    CHECK(e.n_exited == 4000);
    // Grid monitoring overshoots by roughly 0.58 c sqrt(dt) at each side.
    CHECK(std::abs(e.mean - 4.0) < e.ci_halfwidth + 0.1);

    s.c = 2.0;
    const auto e2 = exit_time_mc(s, 2.0, coarse(2.5e-4, 10.0, 12), 4000);
    CHECK(std::abs(e2.mean - 1.0) < e2.ci_halfwidth + 0.03);
  }

  TEST_CASE("double-well exit time agrees with the boundary value solution") {
    const auto s = double_well_system();
    const auto e = exit_time_mc(s, 2.5, coarse(1e-3, 200.0, 3), 2000);
    const double bvp = mean_exit_time_bvp(s, 2.5, -1.0);
    CHECK(std::abs(e.mean - bvp) < 3.0 * e.ci_halfwidth);
  }

  TEST_CASE("horizon too short for the exit estimate") {
    const auto e = [] { return exit_time_mc(brownian_system(), 2.0, coarse(1e-2, 0.5, 1), 100); };
    CHECK_THROWS_AS(e(), Error);
  }
}
