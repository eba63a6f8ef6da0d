#include "omtube/model.hpp"

#include <cmath>
#include <sstream>

#include "omtube/error.hpp"

namespace omtube {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be finite");
}

}  // namespace

DriftModel::DriftModel() : DriftModel(std::vector<double>{0.0}) {}

DriftModel::DriftModel(std::vector<double> coeffs) {
  for (double a : coeffs) require_finite(a, "drift coefficient");
  b_ = Polynomial(std::move(coeffs));
  if (b_.degree() > kMaxDriftDegree) {
    throw Error(ErrorKind::InvalidInput,
                "drift degree " + std::to_string(b_.degree()) + " exceeds " + std::to_string(kMaxDriftDegree));
  }
  db_ = b_.derivative();
  d2b_ = db_.derivative();
  prim_ = b_.antiderivative();
}

DriftModel DriftModel::brownian() { return DriftModel({0.0}); }

DriftModel DriftModel::ornstein_uhlenbeck(double theta) { return DriftModel({0.0, -theta}); }

DriftModel DriftModel::double_well() { return DriftModel({0.0, 1.0, 0.0, -1.0}); }

DriftModel DriftModel::preset(std::string_view name) {
  if (name == "brownian") return brownian();
  if (name == "ou") return ornstein_uhlenbeck(1.0);
  if (name == "double-well") return double_well();
  throw Error(ErrorKind::InvalidInput, "unknown drift preset '" + std::string(name) + "'");
}

std::vector<double> DriftModel::coefficients() const {
  auto c = b_.coefficients();
  return {c.begin(), c.end()};
}

TubeSpec make_tube(const SdeSystem& system, double delta) {
  if (!(delta > 0.0) || !(delta < system.distance())) {
    std::ostringstream os;
    os << "tube radius " << delta << " must lie in (0, " << system.distance() << ")";
    throw Error(ErrorKind::BadTube, os.str());
  }
  return TubeSpec{delta};
}

DriftEval drift_eval(const DriftModel& model, double x) {
  require_finite(x, "x");
  return {model.b(x), model.db(x), model.d2b(x), model.antiderivative(x)};
}

DriftEval drift_eval(const SdeSystem& system, double x) {
  require_finite(x, "x");
  const auto& m = system.drift;
  return {m.b(x), m.db(x), m.d2b(x), m.antiderivative(x, system.x0)};
}

SdeSystem validate_system(const SdeSystem& system, std::vector<std::string>* warnings) {
  for (double v : {system.c, system.l, system.x0, system.xf, system.kappa}) require_finite(v, "system parameter");
  if (!(system.c > 0.0)) throw Error(ErrorKind::BadNoise, "noise intensity c must be positive");
  if (!(system.l > 0.0)) throw Error(ErrorKind::DomainTooSmall, "domain half-width l must be positive");
  if (system.x0 == system.xf) throw Error(ErrorKind::InvalidInput, "x0 and xf must be distinct");
  if (!(system.distance() < system.l)) {
    throw Error(ErrorKind::DomainTooSmall, "|xf - x0| must be smaller than l");
  }
  if (system.kappa < 0.0 || system.kappa > 1.0) throw Error(ErrorKind::InvalidInput, "kappa must lie in [0, 1]");
  for (double x : {system.x0, system.xf}) {
    const double b = system.drift.b(x);
    if (std::abs(b) > kMetastabilityTol) {
      std::ostringstream os;
      os << "b(" << x << ") = " << b << " is not a drift root";
      throw Error(ErrorKind::MetastabilityViolation, os.str());
    }
  }
  if (warnings) {
    if (system.drift.is_zero()) warnings->push_back("zero drift: every point is an equilibrium");
    if (system.distance() > 0.5 * system.l) warnings->push_back("|xf - x0| exceeds l/2; domain may be too small");
  }
  return system;
}

double path_potential(const SdeSystem& system, double x) {
  require_finite(x, "x");
  const double b = system.drift.b(x);
  return -0.5 * b * b - 0.5 * system.c * system.c * system.drift.db(x);
}

SdeSystem double_well_system(double c) {
  return SdeSystem{DriftModel::double_well(), c, 5.0, -1.0, 1.0, 0.5};
}

SdeSystem brownian_system(double c, double x0, double xf) {
  return SdeSystem{DriftModel::brownian(), c, 5.0, x0, xf, 0.5};
}

}  // namespace omtube
