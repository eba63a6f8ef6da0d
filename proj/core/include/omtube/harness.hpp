#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "omtube/model.hpp"
#include "omtube/path.hpp"
#include "omtube/simulate.hpp"

namespace omtube {

struct ExperimentConfig {
  SdeSystem system = double_well_system();
  SimConfig sim;  ///< sim.horizon is the cutoff for first transitions
  std::size_t n_paths = 30000;
  std::vector<double> bin_edges;
};

/// 0, 0.25, 0.30, ..., horizon in steps of 0.05.
std::vector<double> default_bin_edges(double horizon = 1.5);

/// Validates the system and simulation settings and requires strictly
/// increasing bin edges covering (0, horizon].
void validate_experiment(const ExperimentConfig& config);

/// sup_i |sample_i - mptp(t_i)| over the sample grid, mptp linearly
/// interpolated. Throws GridMismatch when the end times differ by more than
/// one sample step.
double path_tube_size(const Path& sample, const Path& mptp);

/// Shooting solutions on a T-grid, computed on first use and blended in
/// scaled time for T between grid nodes. Safe for concurrent use.
class MptpCache {
 public:
  MptpCache(const SdeSystem& system, double max_T, double resolution = 1e-2);
  ~MptpCache();
  MptpCache(const MptpCache&) = delete;
  MptpCache& operator=(const MptpCache&) = delete;

  /// Approximate MPTP for transition time T sampled at t = i*dt, i = 0..n.
  /// Throws the underlying shooting error when a needed node failed.
  Path sample(double T, double dt, std::size_t n);

  double resolution() const noexcept { return resolution_; }

 private:
  struct Node;
  const Path& node(std::size_t k);

  const SdeSystem& system_;
  double resolution_;
  std::vector<std::unique_ptr<Node>> nodes_;
};

/// Exact MPTP at T sampled at t = i*dt, i = 0..n.
Path exact_mptp_sample(const SdeSystem& system, double T, double dt, std::size_t n);

struct BinStat {
  double lo = 0.0;
  double hi = 0.0;
  double mean_tube_size = 0.0;  ///< NaN for an empty bin
  std::size_t count = 0;
};

/// Groups records by T into [e_k, e_{k+1}) (last bin closed) and averages
/// tube sizes. Records with NaN tube size are skipped.
std::vector<BinStat> bin_tube_sizes(const std::vector<TransitionRecord>& records, const std::vector<double>& edges);

struct ExperimentOptions {
  bool memoize = true;
  double memo_resolution = 1e-2;
  unsigned workers = 0;
};

struct ExperimentResult {
  std::vector<TransitionRecord> records;  ///< successful tube sizes, sorted by path_index
  std::vector<BinStat> bins;
  std::size_t n_paths = 0;
  std::size_t n_transitions = 0;  ///< includes MPTP failures
  std::size_t n_mptp_failures = 0;
  std::size_t n_censored_exit = 0;
  std::size_t n_no_transition = 0;
};

/// Simulates n_paths from x0; for each first transition T before the
/// horizon computes the tube size against the MPTP at T.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

/// Re-simulates path `path_index` up to its first transition; nullopt if
/// it never transitions before the horizon.
std::optional<Path> transition_sample(const ExperimentConfig& config, std::size_t path_index);

struct AuditResult {
  std::size_t audited = 0;
  double max_abs_diff = 0.0;
};

/// Compares memoized tube sizes with exact per-T solves on up to
/// `sample_count` records spread evenly over the list.
AuditResult audit_memoization(const ExperimentConfig& config, const std::vector<TransitionRecord>& records,
                              std::size_t sample_count = 100, unsigned workers = 0);

struct ManifestEntry {
  std::string file;
  std::size_t rows = 0;  ///< data rows (CSV) or plotted points (SVG)
};

struct FigureOptions {
  std::vector<double> deltas{0.3, 0.5, 0.8};
  double mptp_T = 10.0;
  double sample_horizon = 10.0;
  double curve_tmin = 0.3;
  double curve_tmax = 1.5;
  std::size_t curve_points = 49;
  unsigned workers = 0;
};

/// Writes fig1_paths, fig1_mptp, fig3_action_curves, fig5_scatter and
/// fig5_bins as CSV plus one SVG each into out_dir.
std::vector<ManifestEntry> reproduce_figures(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                             const FigureOptions& options = {});

void write_records_csv(std::ostream& out, const std::vector<TransitionRecord>& records);
void write_bins_csv(std::ostream& out, const std::vector<BinStat>& bins);

}  // namespace omtube
