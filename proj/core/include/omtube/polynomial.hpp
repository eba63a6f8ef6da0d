#pragma once

#include <span>
#include <vector>

namespace omtube {

/// Dense real polynomial a0 + a1 x + ... + an x^n.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  double operator()(double x) const noexcept;

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept;
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& p);

  /// sup of |p| over [lo, hi]; grid scan followed by refinement of the
  /// critical points of p.
  double max_abs_on(double lo, double hi, int grid_points = 2048) const;

  /// Real roots of p in [lo, hi] found by sign changes on a grid and
  /// bisection; grid nodes where p vanishes exactly are included.
  std::vector<double> roots_in(double lo, double hi, int grid_points = 2048) const;

 private:
  void trim();

  std::vector<double> coeffs_{0.0};
};

}  // namespace omtube
