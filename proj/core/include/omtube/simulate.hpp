#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "omtube/model.hpp"
#include "omtube/path.hpp"
#include "omtube/rng.hpp"

namespace omtube {

/// Time stepping of the theta-scheme
///   x_i - x_{i-1} = [k b(x_i) + (1 - k) b(x_{i-1})] dt + c dW_i.
struct SimConfig {
  double dt = 1e-4;
  double horizon = 1.5;
  std::uint64_t seed = 1;
  double scheme_kappa = 0.0;  ///< 0 is explicit Euler-Maruyama
  double implicit_tol = 1e-12;

  std::size_t steps() const;  ///< round(horizon / dt)
};

/// Throws InvalidInput unless dt > 0, horizon >= dt, implicit_tol > 0 and
/// scheme_kappa in [0, 1].
void validate_sim_config(const SimConfig& config);

/// Seed of path `index` in an ensemble driven by `config.seed`.
inline std::uint64_t path_seed(const SimConfig& config, std::uint64_t index) noexcept {
  return mix64(config.seed, index);
}

/// One theta-scheme step; `dW` is the already scaled increment c*sqrt(dt)*xi.
/// Implicit steps are solved by Newton to config.implicit_tol and throw
/// NewtonDivergence after 50 iterations.
double step(const SdeSystem& system, double x_prev, double dW, const SimConfig& config);

/// Incremental integrator for one sample path started at system.x0.
/// Absorbed on leaving (x0 - halfwidth, x0 + halfwidth); the default
/// half-width is system.l.
class PathStepper {
 public:
  PathStepper(const SdeSystem& system, const SimConfig& config, std::uint64_t seed);
  PathStepper(const SdeSystem& system, const SimConfig& config, std::uint64_t seed, double halfwidth);

  /// Advances one step and returns the new state.
  double advance();

  double state() const noexcept { return x_; }
  std::size_t index() const noexcept { return index_; }
  double time() const noexcept { return static_cast<double>(index_) * config_.dt; }
  bool exited() const noexcept { return !(x_ > lo_ && x_ < hi_); }

 private:
  const SdeSystem& system_;
  const SimConfig& config_;
  NormalStream noise_;
  double scale_;
  double lo_, hi_;
  double x_;
  std::size_t index_ = 0;
};

struct SimulatedPath {
  Path path;
  bool exited = false;
};

/// Integrates from x0 until the horizon or the first exit from D; an exiting
/// path ends at its first exiting sample.
SimulatedPath simulate_path(const SdeSystem& system, const SimConfig& config, std::uint64_t seed);

/// Index of the first sample on the far side of xf (inclusive), if any.
std::optional<std::size_t> first_transition_index(const Path& path, const SdeSystem& system);
std::optional<double> first_transition_time(const Path& path, const SdeSystem& system);

/// First-transition observation of one sample path. tube_size is NaN until
/// filled in by the experiment harness.
struct TransitionRecord {
  std::size_t path_index = 0;
  double T = 0.0;
  double tube_size = std::numeric_limits<double>::quiet_NaN();
};

/// NaN tube sizes compare equal to each other.
bool operator==(const TransitionRecord& a, const TransitionRecord& b) noexcept;

struct EnsembleSummary {
  std::size_t n_paths = 0;
  std::vector<TransitionRecord> transitions;  ///< sorted by path_index
  std::size_t n_censored_exit = 0;
  std::size_t n_no_transition = 0;

  double transition_fraction() const noexcept {
    return n_paths == 0 ? 0.0 : static_cast<double>(transitions.size()) / static_cast<double>(n_paths);
  }
  friend bool operator==(const EnsembleSummary&, const EnsembleSummary&) = default;
};


/// Simulates n independent paths; path i uses path_seed(config, i). The
/// result does not depend on `workers` (0 = hardware concurrency).
EnsembleSummary simulate_ensemble(const SdeSystem& system, const SimConfig& config, std::size_t n,
                                  unsigned workers = 0);

struct ExitTimeEstimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  ///< 99% normal approximation
  std::size_t n_exited = 0;
  std::size_t n_paths = 0;
};

/// Monte Carlo mean of the first exit time from (x0 - h, x0 + h). Throws
/// HorizonTooShort when more than 1% of paths are still inside at the horizon.
ExitTimeEstimate exit_time_mc(const SdeSystem& system, double halfwidth, const SimConfig& config, std::size_t n,
                              unsigned workers = 0);

inline constexpr double kZ99 = 2.5758293035489004;

}  // namespace omtube
