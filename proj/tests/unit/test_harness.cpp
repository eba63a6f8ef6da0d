#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "omtube/config.hpp"
#include "omtube/error.hpp"
#include "omtube/harness.hpp"

using namespace omtube;

namespace {

ExperimentConfig small_config(std::size_t n) {
  ExperimentConfig cfg;
  cfg.sim.dt = 1e-3;
  cfg.sim.horizon = 1.5;
  cfg.sim.seed = 7;
  cfg.n_paths = n;
  cfg.bin_edges = default_bin_edges(1.5);
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("default bin edges") {
    const auto e = default_bin_edges(1.5);
    REQUIRE(e.size() == 27);
    CHECK(e[0] == 0.0);
    CHECK(e[1] == 0.25);
    CHECK(e[2] == doctest::Approx(0.3));
    CHECK(e.back() == 1.5);
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] > e[i - 1]);
  }

  TEST_CASE("tube size of identical and shifted paths") {
    const Path a(0.0, 0.1, {-1.0, -0.5, 0.2, 0.9, 1.0});
    CHECK(path_tube_size(a, a) == 0.0);
    std::vector<double> shifted = a.values();
    for (double& v : shifted) v += 0.3;
    CHECK(path_tube_size(Path(0.0, 0.1, shifted), a) == doctest::Approx(0.3));
  }

  TEST_CASE("tube size interpolates a coarser MPTP") {
    const Path sample(0.0, 0.05, {0.0, 0.05, 0.1, 0.15, 0.2});
    const Path line(0.0, 0.1, {0.0, 0.1, 0.2});
    CHECK(path_tube_size(sample, line) == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("tube size rejects mismatched windows") {
    const Path a(0.0, 0.1, {0.0, 0.1, 0.2});
    const Path b(0.0, 0.1, {0.0, 0.1, 0.2, 0.3, 0.4});
    try {
      path_tube_size(a, b);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GridMismatch);
    }
    CHECK_NOTHROW(path_tube_size(a, Path(0.0, 0.1, {0.0, 0.1, 0.2, 0.3})));
  }

  TEST_CASE("binning") {
    const std::vector<double> edges{0.0, 0.5, 1.0, 1.5};
    std::vector<TransitionRecord> recs{{0, 0.2, 0.1}, {1, 0.5, 0.4}, {2, 0.7, 0.6}, {3, 1.5, 1.0},
                                       {4, 1.2, std::numeric_limits<double>::quiet_NaN()}};
    const auto bins = bin_tube_sizes(recs, edges);
    REQUIRE(bins.size() == 3);
    CHECK(bins[0].count == 1);
    CHECK(bins[0].mean_tube_size == doctest::Approx(0.1));
    CHECK(bins[1].count == 2);
    CHECK(bins[1].mean_tube_size == doctest::Approx(0.5));
    CHECK(bins[2].count == 1);
    CHECK(bins[2].mean_tube_size == doctest::Approx(1.0));

    std::mt19937 gen(3);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(recs.begin(), recs.end(), gen);
      const auto again = bin_tube_sizes(recs, edges);
      for (std::size_t i = 0; i < bins.size(); ++i) {
        CHECK(again[i].count == bins[i].count);
        CHECK(again[i].mean_tube_size == doctest::Approx(bins[i].mean_tube_size).epsilon(1e-15));
      }
    }
    const auto empty = bin_tube_sizes({}, edges);
    for (const auto& b : empty) {
      CHECK(b.count == 0);
      CHECK(std::isnan(b.mean_tube_size));
    }
  }

  TEST_CASE("experiment with no paths") {
    const auto r = run_experiment(small_config(0));
    CHECK(r.records.empty());
    CHECK(r.n_transitions == 0);
    for (const auto& b : r.bins) CHECK(b.count == 0);
  }

  TEST_CASE("experiment records respect their invariants") {
    const auto cfg = small_config(600);
    const auto r = run_experiment(cfg, ExperimentOptions{true, 1e-2, 1});
    CHECK(r.n_transitions > 20);
    CHECK(r.n_mptp_failures == 0);
    CHECK(r.n_transitions + r.n_censored_exit + r.n_no_transition == cfg.n_paths);
    for (const auto& rec : r.records) {
      CHECK(rec.T > 0.0);
      CHECK(rec.T <= cfg.sim.horizon + 1e-12);
      CHECK(rec.tube_size >= 0.0);
      CHECK(rec.tube_size <= 2.0 * (cfg.system.l + rec.tube_size));
      CHECK(rec.tube_size <= 2.0 * cfg.system.l);
    }
    std::size_t binned = 0;
    for (const auto& b : r.bins) binned += b.count;
    CHECK(binned == r.records.size());

    const auto again = run_experiment(cfg, ExperimentOptions{true, 1e-2, 4});
    REQUIRE(again.records.size() == r.records.size());
    for (std::size_t i = 0; i < r.records.size(); ++i) CHECK(again.records[i] == r.records[i]);
  }

  TEST_CASE("memoized and exact tube sizes agree") {
    const auto cfg = small_config(400);
    const auto memo = run_experiment(cfg, ExperimentOptions{true, 1e-2, 1});
    const auto exact = run_experiment(cfg, ExperimentOptions{false, 1e-2, 1});
    REQUIRE(memo.records.size() == exact.records.size());
    for (std::size_t i = 0; i < memo.records.size(); ++i) {
      CHECK(std::abs(memo.records[i].tube_size - exact.records[i].tube_size) < 1e-2);
    }
    const auto audit = audit_memoization(cfg, memo.records, 100, 1);
    CHECK(audit.audited == std::min<std::size_t>(100, memo.records.size()));
    CHECK(audit.max_abs_diff < 1e-2);
  }

  TEST_CASE("re-simulated transition sample matches its record") {
    const auto cfg = small_config(200);
    const auto r = run_experiment(cfg);
    REQUIRE_FALSE(r.records.empty());
    const auto& rec = r.records.front();
    const auto sample = transition_sample(cfg, rec.path_index);
    REQUIRE(sample.has_value());
    CHECK(sample->end_time() == doctest::Approx(rec.T).epsilon(1e-12));
  }

  TEST_CASE("CSV writers") {
    std::ostringstream rec;
    write_records_csv(rec, {{3, 0.5, 0.25}});
    CHECK(rec.str() == "path_index,T,tube_size\n3,0.5,0.25\n");
    std::ostringstream bins;
    write_bins_csv(bins, {{0.25, 0.3, 0.5, 4}});
    CHECK(bins.str() == "bin_lo,bin_hi,mean_tube_size,count\n0.25,0.3,0.5,4\n");
  }

  TEST_CASE("figure reproduction is complete and deterministic") {
    auto cfg = small_config(300);
    FigureOptions opts;
    opts.mptp_T = 10.0;
    opts.sample_horizon = 2.0;
    opts.curve_points = 7;
    opts.workers = 1;
    const auto dir = std::filesystem::temp_directory_path() / "omtube_fig_test";
    std::filesystem::remove_all(dir);
    const auto manifest = reproduce_figures(cfg, dir / "a", opts);
    REQUIRE(manifest.size() == 10);
    std::size_t csvs = 0, svgs = 0;
    for (const auto& m : manifest) {
      CHECK(std::filesystem::exists(dir / "a" / m.file));
      if (m.file.ends_with(".csv")) ++csvs;
      if (m.file.ends_with(".svg")) ++svgs;
    }
    CHECK(csvs == 5);
    CHECK(svgs == 5);
    std::ifstream curves(dir / "a" / "fig3_action_curves.csv");
    std::string header;
    std::getline(curves, header);
    CHECK(header == "T,s_mom_delta_0.3,s_mom_delta_0.5,s_mom_delta_0.8");

    reproduce_figures(cfg, dir / "b", opts);
    for (const auto& m : manifest) {
      if (m.file.ends_with(".csv")) CHECK(slurp(dir / "a" / m.file) == slurp(dir / "b" / m.file));
    }
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("experiment validation") {
    auto cfg = small_config(10);
    cfg.bin_edges = {0.0, 0.5, 0.4, 1.5};
    CHECK_THROWS_AS(run_experiment(cfg), Error);
    cfg.bin_edges = {0.0, 1.0};
    CHECK_THROWS_AS(run_experiment(cfg), Error);
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults describe the double-well experiment") {
    const auto cfg = parse_config("{}");
    CHECK(cfg.system.drift.b(0.5) == doctest::Approx(0.375));
    CHECK(cfg.system.x0 == -1.0);
    CHECK(cfg.system.xf == 1.0);
    CHECK(cfg.system.c == 1.0);
    CHECK(cfg.system.l == 5.0);
    CHECK(cfg.sim.dt == 1e-4);
    CHECK(cfg.sim.horizon == 1.5);
    CHECK(cfg.n_paths == 30000);
    CHECK(cfg.bin_edges == default_bin_edges(1.5));
  }

  TEST_CASE("explicit document") {
    const auto cfg = parse_config(R"({"drift": {"coeffs": [0, -2]}, "c": 0.5, "l": 3, "x0": 0, "xf": 1,
      "kappa": 0.25, "sim": {"dt": 0.001, "horizon": 2, "seed": 9},
      "experiment": {"n_paths": 12, "bin_edges": [0, 1, 2]}})");
    CHECK(cfg.system.drift.db(0.0) == -2.0);
    CHECK(cfg.system.c == 0.5);
    CHECK(cfg.system.kappa == 0.25);
    CHECK(cfg.sim.seed == 9);
    CHECK(cfg.n_paths == 12);
    CHECK(cfg.bin_edges == std::vector<double>{0, 1, 2});
    CHECK(parse_drift(R"({"preset": "ou", "theta": 2})").b(1.0) == doctest::Approx(-2.0));
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(parse_config("{not json"), Error);
    CHECK_THROWS_AS(parse_config(R"({"c": "one"})"), Error);
    CHECK_THROWS_AS(parse_config(R"({"drift": {"preset": "nope"}})"), Error);
    CHECK_THROWS_AS(load_config("/nonexistent/omtube.json"), Error);
  }
}
