#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "omtube/polynomial.hpp"

namespace omtube {

/// Tolerance on |b(x0)|, |b(xf)| for an endpoint to count as a drift root.
inline constexpr double kMetastabilityTol = 1e-10;
inline constexpr int kMaxDriftDegree = 10;

/// Polynomial drift b(x) = sum a_i x^i with exact derivatives.
class DriftModel {
 public:
  DriftModel();
  explicit DriftModel(std::vector<double> coeffs);

  static DriftModel brownian();
  static DriftModel ornstein_uhlenbeck(double theta);
  static DriftModel double_well();
  /// "brownian", "ou" (theta = 1) or "double-well".
  static DriftModel preset(std::string_view name);

  double b(double x) const noexcept { return b_(x); }
  double db(double x) const noexcept { return db_(x); }
  double d2b(double x) const noexcept { return d2b_(x); }
  /// Integral of b from `origin` to x.
  double antiderivative(double x, double origin = 0.0) const noexcept {
    return prim_(x) - prim_(origin);
  }

  const Polynomial& polynomial() const noexcept { return b_; }
  const Polynomial& first_derivative() const noexcept { return db_; }
  const Polynomial& second_derivative() const noexcept { return d2b_; }
  std::vector<double> coefficients() const;
  bool is_zero() const noexcept { return b_.is_zero(); }

 private:
  Polynomial b_, db_, d2b_, prim_;
};

struct DriftEval {
  double b = 0.0;
  double db = 0.0;
  double d2b = 0.0;
  double potential = 0.0;  ///< integral of b from the reference point
};

/// 1-D additive-noise SDE dX = b(X) dt + c dW on D = (x0 - l, x0 + l).
struct SdeSystem {
  DriftModel drift;
  double c = 1.0;
  double l = 5.0;
  double x0 = -1.0;
  double xf = 1.0;
  double kappa = 0.5;

  double distance() const noexcept { return xf > x0 ? xf - x0 : x0 - xf; }
  double domain_lo() const noexcept { return x0 - l; }
  double domain_hi() const noexcept { return x0 + l; }
  bool in_domain(double x) const noexcept { return x > x0 - l && x < x0 + l; }
};

/// Tube radius with 0 < delta < |xf - x0|.
struct TubeSpec {
  double delta;
};

/// Throws Error(BadTube) unless 0 < delta < |xf - x0|.
TubeSpec make_tube(const SdeSystem& system, double delta);

DriftEval drift_eval(const DriftModel& model, double x);
/// Antiderivative measured from system.x0.
DriftEval drift_eval(const SdeSystem& system, double x);

/// Returns `system` unchanged when every invariant holds; throws otherwise.
/// Non-fatal observations (zero drift, |xf - x0| > l/2) are appended to
/// `warnings` when given.
SdeSystem validate_system(const SdeSystem& system, std::vector<std::string>* warnings = nullptr);

/// Effective potential of the Euler-Lagrange flow: -b^2/2 - (c^2/2) b'.
double path_potential(const SdeSystem& system, double x);

/// Named systems used by the examples, tests and CLI defaults.
SdeSystem double_well_system(double c = 1.0);
SdeSystem brownian_system(double c = 1.0, double x0 = 0.0, double xf = 1.0);

}  // namespace omtube
