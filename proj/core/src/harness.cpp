#include "omtube/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "omtube/error.hpp"
#include "omtube/parallel.hpp"
#include "omtube/svg.hpp"
#include "omtube/optimize.hpp"
#include "omtube/variational.hpp"

namespace omtube {

std::vector<double> default_bin_edges(double horizon) {
  std::vector<double> edges{0.0};
  if (horizon <= 0.25) {
    edges.push_back(horizon);
    return edges;
  }
  edges.push_back(0.25);
  for (int k = 6;; ++k) {
    const double e = k / 20.0;
    if (e >= horizon - 1e-9) break;
    edges.push_back(e);
  }
  edges.push_back(horizon);
  return edges;
}

void validate_experiment(const ExperimentConfig& config) {
  validate_system(config.system);
  validate_sim_config(config.sim);
  const auto& e = config.bin_edges;
  if (e.size() < 2) throw Error(ErrorKind::InvalidInput, "need at least two bin edges");
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] > e[i - 1])) throw Error(ErrorKind::InvalidInput, "bin edges must be strictly increasing");
  }
  if (e.front() > 0.0 || e.back() < config.sim.horizon) {
    throw Error(ErrorKind::InvalidInput, "bin edges must cover (0, horizon]");
  }
}

double path_tube_size(const Path& sample, const Path& mptp) {
  if (std::abs(sample.end_time() - mptp.end_time()) > sample.dt() * (1.0 + 1e-9) ||
      std::abs(sample.t0() - mptp.t0()) > sample.dt() * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "sample window [" << sample.t0() << ", " << sample.end_time() << "] vs MPTP window [" << mptp.t0() << ", "
       << mptp.end_time() << "]";
    throw Error(ErrorKind::GridMismatch, os.str());
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) sup = std::max(sup, std::abs(sample[i] - mptp.at(sample.time(i))));
  return sup;
}

struct MptpCache::Node {
  std::once_flag once;
  std::optional<Path> path;
  std::optional<Error> error;
};

MptpCache::MptpCache(const SdeSystem& system, double max_T, double resolution)
    : system_(system), resolution_(resolution) {
  if (!(resolution > 0.0) || !(max_T > 0.0)) throw Error(ErrorKind::InvalidInput, "cache needs positive sizes");
  const auto count = static_cast<std::size_t>(std::ceil(max_T / resolution)) + 2;
  nodes_.reserve(count);
  for (std::size_t k = 0; k < count; ++k) nodes_.push_back(std::make_unique<Node>());
}

MptpCache::~MptpCache() = default;

const Path& MptpCache::node(std::size_t k) {
  auto& n = *nodes_.at(k);
  std::call_once(n.once, [&] {
    try {
      n.path = solve_mptp(system_, static_cast<double>(k) * resolution_).path;
    } catch (const Error& e) {
      n.error = e;
    }
  });
  if (n.error) throw *n.error;
  return *n.path;
}

Path exact_mptp_sample(const SdeSystem& system, double T, double dt, std::size_t n) {
  const auto sol = solve_mptp(system, T);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = sol.path.at(std::min(static_cast<double>(i) * dt, T));
  return Path(0.0, dt, std::move(v));
}

Path MptpCache::sample(double T, double dt, std::size_t n) {
  const double pos = T / resolution_;
  auto k = static_cast<std::size_t>(std::floor(pos + 1e-9));
  if (k == 0 || k + 1 >= nodes_.size()) return exact_mptp_sample(system_, T, dt, n);
  const double w = std::max(0.0, pos - static_cast<double>(k));
  const Path& a = node(k);
  const double Ta = static_cast<double>(k) * resolution_;
  std::vector<double> v(n + 1);
  if (w < 1e-9) {
    for (std::size_t i = 0; i <= n; ++i) v[i] = a.at(std::min(static_cast<double>(i) * dt / T, 1.0) * Ta);
  } else {
    const Path& b = node(k + 1);
    const double Tb = static_cast<double>(k + 1) * resolution_;
    for (std::size_t i = 0; i <= n; ++i) {
      const double s = std::min(static_cast<double>(i) * dt / T, 1.0);
      v[i] = (1.0 - w) * a.at(s * Ta) + w * b.at(s * Tb);
    }
  }
  return Path(0.0, dt, std::move(v));
}

std::vector<BinStat> bin_tube_sizes(const std::vector<TransitionRecord>& records, const std::vector<double>& edges) {
  std::vector<BinStat> bins;
  if (edges.size() < 2) return bins;
  bins.resize(edges.size() - 1);
  std::vector<double> sums(bins.size(), 0.0);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    bins[k].lo = edges[k];
    bins[k].hi = edges[k + 1];
  }
  for (const auto& r : records) {
    if (std::isnan(r.tube_size)) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), r.T);
    std::size_t k = static_cast<std::size_t>(it - edges.begin());
    if (k == 0) continue;
    --k;
    if (k == bins.size()) {
      if (r.T != edges.back()) continue;
      k = bins.size() - 1;
    }
    sums[k] += r.tube_size;
    ++bins[k].count;
  }
  for (std::size_t k = 0; k < bins.size(); ++k) {
    bins[k].mean_tube_size =
        bins[k].count ? sums[k] / static_cast<double>(bins[k].count) : std::numeric_limits<double>::quiet_NaN();
  }
  return bins;
}

namespace {

// Path from x0 up to and including its first crossing of xf, or nullopt.
std::optional<Path> simulate_to_transition(const SdeSystem& system, const SimConfig& sim, std::uint64_t seed,
                                           bool& exited) {
  const std::size_t steps = sim.steps();
  PathStepper stepper(system, sim, seed);
  std::vector<double> values{system.x0};
  const double side = system.x0 > system.xf ? 1.0 : -1.0;
  exited = false;
  for (std::size_t k = 0; k < steps; ++k) {
    const double x = stepper.advance();
    values.push_back(x);
    if ((x - system.xf) * side <= 0.0) return Path(0.0, sim.dt, std::move(values));
    if (stepper.exited()) {
      exited = true;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

enum class Kind : unsigned char { None, Transition, Exit, MptpFailure, Failed };

struct Outcome {
  Kind kind = Kind::None;
  TransitionRecord record;
  std::string error;
};

}  // namespace

std::optional<Path> transition_sample(const ExperimentConfig& config, std::size_t path_index) {
  bool exited = false;
  return simulate_to_transition(config.system, config.sim, path_seed(config.sim, path_index), exited);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  validate_experiment(config);
  const auto& system = config.system;
  const auto& sim = config.sim;
  MptpCache cache(system, sim.horizon, options.memo_resolution);

  std::vector<Outcome> outcomes(config.n_paths);
  parallel_for(config.n_paths, options.workers, [&](std::size_t i) {
    auto& out = outcomes[i];
    try {
      bool exited = false;
      auto sample = simulate_to_transition(system, sim, path_seed(sim, i), exited);
      if (!sample) {
        out.kind = exited ? Kind::Exit : Kind::None;
        return;
      }
      const double T = sample->end_time();
      out.record = {i, T};
      try {
        const Path mptp = options.memoize ? cache.sample(T, sim.dt, sample->steps())
                                          : exact_mptp_sample(system, T, sim.dt, sample->steps());
        out.record.tube_size = path_tube_size(*sample, mptp);
        out.kind = Kind::Transition;
      } catch (const Error& e) {
        if (e.category() != ErrorCategory::Numerical) throw;
        out.kind = Kind::MptpFailure;
        out.error = e.what();
      }
    } catch (const std::exception& e) {
      out.kind = Kind::Failed;
      out.error = e.what();
    }
  });

  ExperimentResult result;
  result.n_paths = config.n_paths;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    switch (o.kind) {
      case Kind::Transition:
        result.records.push_back(o.record);
        ++result.n_transitions;
        break;
      case Kind::MptpFailure:
        ++result.n_mptp_failures;
        ++result.n_transitions;
        break;
      case Kind::Exit: ++result.n_censored_exit; break;
      case Kind::None: ++result.n_no_transition; break;
      case Kind::Failed: throw Error(ErrorKind::PathFailures, "path " + std::to_string(i) + ": " + o.error);
    }
  }
  result.bins = bin_tube_sizes(result.records, config.bin_edges);
  return result;
}

AuditResult audit_memoization(const ExperimentConfig& config, const std::vector<TransitionRecord>& records,
                              std::size_t sample_count, unsigned workers) {
  AuditResult audit;
  if (records.empty() || sample_count == 0) return audit;
  const std::size_t count = std::min(sample_count, records.size());
  MptpCache cache(config.system, config.sim.horizon);
  std::vector<double> diffs(count, 0.0);
  parallel_for(count, workers, [&](std::size_t j) {
    const auto& rec = records[j * records.size() / count];
    const auto sample = transition_sample(config, rec.path_index);
    if (!sample) throw Error(ErrorKind::InvalidInput, "record does not match its re-simulated path");
    const double memo = path_tube_size(*sample, cache.sample(sample->end_time(), config.sim.dt, sample->steps()));
    const double exact =
        path_tube_size(*sample, exact_mptp_sample(config.system, sample->end_time(), config.sim.dt, sample->steps()));
    diffs[j] = std::abs(memo - exact);
  });
  audit.audited = count;
  audit.max_abs_diff = *std::max_element(diffs.begin(), diffs.end());
  return audit;
}

void write_records_csv(std::ostream& out, const std::vector<TransitionRecord>& records) {
  out << "path_index,T,tube_size\n" << std::setprecision(15);
  for (const auto& r : records) out << r.path_index << ',' << r.T << ',' << r.tube_size << '\n';
}

void write_bins_csv(std::ostream& out, const std::vector<BinStat>& bins) {
  out << "bin_lo,bin_hi,mean_tube_size,count\n" << std::setprecision(15);
  for (const auto& b : bins) out << b.lo << ',' << b.hi << ',' << b.mean_tube_size << ',' << b.count << '\n';
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
  out << std::setprecision(15);
  return out;
}

std::string delta_label(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

}  // namespace

std::vector<ManifestEntry> reproduce_figures(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                             const FigureOptions& options) {
  validate_experiment(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  const auto& system = config.system;
  std::vector<ManifestEntry> manifest;
  auto add = [&](const std::string& name, std::size_t rows) { manifest.push_back({name, rows}); };

  // fig1_paths: sample paths of zero drift and of the configured system.
  {
    SimConfig sim = config.sim;
    sim.horizon = options.sample_horizon;
    SdeSystem bm = brownian_system(system.c, 0.0, 1.0);
    bm.l = 1e6;
    constexpr std::uint64_t kFigureStream = 1'000'000'000ULL;
    std::vector<Path> paths;
    for (std::uint64_t j = 0; j < 2; ++j) paths.push_back(simulate_path(bm, sim, path_seed(sim, kFigureStream + j)).path);
    for (std::uint64_t j = 0; j < 2; ++j) {
      paths.push_back(simulate_path(system, sim, path_seed(sim, kFigureStream + 2 + j)).path);
    }
    const std::size_t steps = sim.steps();
    const std::size_t stride = std::max<std::size_t>(1, steps / 1000);
    auto out = open_out(out_dir / "fig1_paths.csv");
    out << "t,brownian_1,brownian_2,system_1,system_2\n";
    std::vector<PlotSeries> series(4);
    const char* labels[] = {"brownian 1", "brownian 2", "system 1", "system 2"};
    std::size_t rows = 0;
    for (std::size_t i = 0; i <= steps; i += stride) {
      const double t = static_cast<double>(i) * sim.dt;
      out << t;
      for (std::size_t k = 0; k < 4; ++k) {
        const double v = i < paths[k].size() ? paths[k][i] : std::numeric_limits<double>::quiet_NaN();
        out << ',' << v;
        series[k].x.push_back(t);
        series[k].y.push_back(v);
      }
      out << '\n';
      ++rows;
    }
    add("fig1_paths.csv", rows);
    for (std::size_t k = 0; k < 4; ++k) series[k].label = labels[k];
    add("fig1_paths.svg", write_svg_plot((out_dir / "fig1_paths.svg").string(), "Sample paths", "t", "x", series));
  }

  // fig1_mptp: long-time MPTP.
  {
    const auto sol = solve_mptp(system, options.mptp_T);
    const std::size_t stride = std::max<std::size_t>(1, sol.path.steps() / 1000);
    auto out = open_out(out_dir / "fig1_mptp.csv");
    out << "t,x\n";
    PlotSeries s{"MPTP T=" + delta_label(options.mptp_T), {}, {}, false};
    std::size_t rows = 0;
    for (std::size_t i = 0; i < sol.path.size(); i += stride) {
      out << sol.path.time(i) << ',' << sol.path[i] << '\n';
      s.x.push_back(sol.path.time(i));
      s.y.push_back(sol.path[i]);
      ++rows;
    }
    add("fig1_mptp.csv", rows);
    add("fig1_mptp.svg",
        write_svg_plot((out_dir / "fig1_mptp.svg").string(), "Most probable transition path", "t", "x", {s}));
  }

  // fig3_action_curves: modified action against T for each tube size.
  {
    const auto grid = uniform_grid(options.curve_tmin, options.curve_tmax, options.curve_points);
    const auto rows = action_vs_time(system, options.deltas.front(), grid, options.workers);
    auto out = open_out(out_dir / "fig3_action_curves.csv");
    out << "T";
    for (double d : options.deltas) out << ",s_mom_delta_" << delta_label(d);
    out << '\n';
    std::vector<PlotSeries> series;
    for (double d : options.deltas) series.push_back({"delta=" + delta_label(d), {}, {}, false});
    for (const auto& r : rows) {
      out << r.T;
      for (std::size_t k = 0; k < options.deltas.size(); ++k) {
        const double v = r.ok ? r.s_om + tube_penalty(system.c, options.deltas[k], r.T)
                              : std::numeric_limits<double>::quiet_NaN();
        out << ',' << v;
        series[k].x.push_back(r.T);
        series[k].y.push_back(v);
      }
      out << '\n';
    }
    add("fig3_action_curves.csv", rows.size());
    add("fig3_action_curves.svg",
        write_svg_plot((out_dir / "fig3_action_curves.svg").string(), "Modified OM action", "T", "S_mOM", series));
  }

  // fig5_*: transition times against tube sizes, with bin means.
  {
    const auto result = run_experiment(config, ExperimentOptions{true, 1e-2, options.workers});
    {
      auto out = open_out(out_dir / "fig5_scatter.csv");
      write_records_csv(out, result.records);
    }
    add("fig5_scatter.csv", result.records.size());
    PlotSeries scatter{"transition paths", {}, {}, true};
    for (const auto& r : result.records) {
      scatter.x.push_back(r.T);
      scatter.y.push_back(r.tube_size);
    }
    add("fig5_scatter.svg", write_svg_plot((out_dir / "fig5_scatter.svg").string(), "Transition times and tube sizes",
                                           "T", "tube size", {scatter}));
    {
      auto out = open_out(out_dir / "fig5_bins.csv");
      write_bins_csv(out, result.bins);
    }
    add("fig5_bins.csv", result.bins.size());
    PlotSeries means{"mean tube size", {}, {}, false};
    for (const auto& b : result.bins) {
      means.x.push_back(0.5 * (b.lo + b.hi));
      means.y.push_back(b.mean_tube_size);
    }
    add("fig5_bins.svg",
        write_svg_plot((out_dir / "fig5_bins.svg").string(), "Binned mean tube size", "T", "mean tube size", {means}));
  }
  return manifest;
}

}  // namespace omtube
