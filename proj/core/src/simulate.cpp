#include "omtube/simulate.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <sstream>

#include "omtube/error.hpp"
#include "omtube/parallel.hpp"

namespace omtube {

double NormalStream::next() { return boost::random::normal_distribution<double>{}(engine_); }

double NormalStream::uniform() { return boost::random::uniform_01<double>{}(engine_); }

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(horizon / dt)); }

void validate_sim_config(const SimConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw Error(ErrorKind::InvalidInput, "dt must be positive");
  if (!(config.horizon >= config.dt) || !std::isfinite(config.horizon)) {
    throw Error(ErrorKind::InvalidInput, "horizon must be at least dt");
  }
  if (!(config.implicit_tol > 0.0)) throw Error(ErrorKind::InvalidInput, "implicit_tol must be positive");
  if (!(config.scheme_kappa >= 0.0 && config.scheme_kappa <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "scheme_kappa must lie in [0, 1]");
  }
}

double step(const SdeSystem& system, double x_prev, double dW, const SimConfig& config) {
  const auto& drift = system.drift;
  const double k = config.scheme_kappa;
  const double explicit_part = x_prev + (1.0 - k) * drift.b(x_prev) * config.dt + dW;
  if (k == 0.0) return explicit_part;

  // Newton on g(x) = x - k b(x) dt - explicit_part, started from the explicit step.
  double x = x_prev + drift.b(x_prev) * config.dt + dW;
  for (int it = 0; it < 50; ++it) {
    const double g = x - k * drift.b(x) * config.dt - explicit_part;
    const double dg = 1.0 - k * drift.db(x) * config.dt;
    if (dg == 0.0 || !std::isfinite(dg)) break;
    const double dx = g / dg;
    x -= dx;
    if (!std::isfinite(x)) break;
    if (std::abs(dx) <= config.implicit_tol * std::max(1.0, std::abs(x))) return x;
  }
  std::ostringstream os;
  os << "implicit step from x = " << x_prev << " did not converge";
  throw Error(ErrorKind::NewtonDivergence, os.str());
}

PathStepper::PathStepper(const SdeSystem& system, const SimConfig& config, std::uint64_t seed)
    : PathStepper(system, config, seed, system.l) {}

PathStepper::PathStepper(const SdeSystem& system, const SimConfig& config, std::uint64_t seed, double halfwidth)
    : system_(system),
      config_(config),
      noise_(seed),
      scale_(system.c * std::sqrt(config.dt)),
      lo_(system.x0 - halfwidth),
      hi_(system.x0 + halfwidth),
      x_(system.x0) {}

double PathStepper::advance() {
  x_ = step(system_, x_, scale_ * noise_.next(), config_);
  ++index_;
  return x_;
}

SimulatedPath simulate_path(const SdeSystem& system, const SimConfig& config, std::uint64_t seed) {
  validate_sim_config(config);
  const std::size_t n = config.steps();
  std::vector<double> values;
  values.reserve(n + 1);
  values.push_back(system.x0);
  PathStepper stepper(system, config, seed);
  bool exited = false;
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(stepper.advance());
    if (stepper.exited()) {
      exited = true;
      break;
    }
  }
  return {Path(0.0, config.dt, std::move(values)), exited};
}

namespace {

bool crossed(double x, const SdeSystem& system) noexcept {
  const double side = system.x0 > system.xf ? 1.0 : -1.0;
  return (x - system.xf) * side <= 0.0;
}

}  // namespace

std::optional<std::size_t> first_transition_index(const Path& path, const SdeSystem& system) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (crossed(path[i], system)) return i;
  }
  return std::nullopt;
}

std::optional<double> first_transition_time(const Path& path, const SdeSystem& system) {
  if (auto i = first_transition_index(path, system)) return path.time(*i);
  return std::nullopt;
}

bool operator==(const TransitionRecord& a, const TransitionRecord& b) noexcept {
  const bool same_tube = (a.tube_size == b.tube_size) || (std::isnan(a.tube_size) && std::isnan(b.tube_size));
  return a.path_index == b.path_index && a.T == b.T && same_tube;
}

namespace {

enum class Outcome : unsigned char { NoTransition, Transition, Exit, Failed };

struct PathOutcome {
  Outcome outcome = Outcome::NoTransition;
  double time = 0.0;
  std::string error;
};

[[noreturn]] void throw_path_failures(const std::vector<PathOutcome>& outcomes) {
  std::ostringstream os;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].outcome != Outcome::Failed) continue;
    if (failed < 5) os << (failed ? "; " : "") << "path " << i << ": " << outcomes[i].error;
    ++failed;
  }
  throw Error(ErrorKind::PathFailures, std::to_string(failed) + " path(s) failed: " + os.str());
}

}  // namespace

EnsembleSummary simulate_ensemble(const SdeSystem& system, const SimConfig& config, std::size_t n, unsigned workers) {
  validate_sim_config(config);
  const std::size_t steps = config.steps();
  std::vector<PathOutcome> outcomes(n);
  parallel_for(n, workers, [&](std::size_t i) {
    auto& out = outcomes[i];
    try {
      PathStepper stepper(system, config, path_seed(config, i));
      for (std::size_t k = 0; k < steps; ++k) {
        const double x = stepper.advance();
        if (crossed(x, system)) {
          out.outcome = Outcome::Transition;
          out.time = stepper.time();
          return;
        }
        if (stepper.exited()) {
          out.outcome = Outcome::Exit;
          return;
        }
      }
    } catch (const std::exception& e) {
      out.outcome = Outcome::Failed;
      out.error = e.what();
    }
  });

  EnsembleSummary summary;
  summary.n_paths = n;
  for (std::size_t i = 0; i < n; ++i) {
    switch (outcomes[i].outcome) {
      case Outcome::Transition: summary.transitions.push_back({i, outcomes[i].time}); break;
      case Outcome::Exit: ++summary.n_censored_exit; break;
      case Outcome::NoTransition: ++summary.n_no_transition; break;
      case Outcome::Failed: throw_path_failures(outcomes);
    }
  }
  return summary;
}

ExitTimeEstimate exit_time_mc(const SdeSystem& system, double halfwidth, const SimConfig& config, std::size_t n,
                              unsigned workers) {
  validate_sim_config(config);
  if (!(halfwidth > 0.0)) throw Error(ErrorKind::InvalidInput, "exit half-width must be positive");
  if (n < 2) throw Error(ErrorKind::InvalidInput, "exit_time_mc needs at least two paths");
  const std::size_t steps = config.steps();
  std::vector<PathOutcome> outcomes(n);
  parallel_for(n, workers, [&](std::size_t i) {
    auto& out = outcomes[i];
    try {
      PathStepper stepper(system, config, path_seed(config, i), halfwidth);
      for (std::size_t k = 0; k < steps; ++k) {
        stepper.advance();
        if (stepper.exited()) {
          out.outcome = Outcome::Exit;
          out.time = stepper.time();
          return;
        }
      }
    } catch (const std::exception& e) {
      out.outcome = Outcome::Failed;
      out.error = e.what();
    }
  });

  ExitTimeEstimate est;
  est.n_paths = n;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& o : outcomes) {
    if (o.outcome == Outcome::Failed) throw_path_failures(outcomes);
    if (o.outcome != Outcome::Exit) continue;
    ++est.n_exited;
    sum += o.time;
    sum_sq += o.time * o.time;
  }
  const std::size_t stuck = n - est.n_exited;
  if (static_cast<double>(stuck) > 0.01 * static_cast<double>(n)) {
    throw Error(ErrorKind::HorizonTooShort,
                std::to_string(stuck) + " of " + std::to_string(n) + " paths did not exit before the horizon");
  }
  const auto m = static_cast<double>(est.n_exited);
  est.mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0));
  est.ci_halfwidth = kZ99 * std::sqrt(var / m);
  return est;
}

}  // namespace omtube
