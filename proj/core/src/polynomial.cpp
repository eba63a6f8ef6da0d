#include "omtube/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omtube {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

bool Polynomial::is_zero() const noexcept {
  return coeffs_.size() == 1 && coeffs_[0] == 0.0;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial{};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> a(coeffs_.size() + 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(a));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(r));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) r[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) r[i] += b.coeffs_[i];
  return Polynomial(std::move(r));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> r = p.coeffs_;
  for (double& v : r) v *= s;
  return Polynomial(std::move(r));
}

std::vector<double> Polynomial::roots_in(double lo, double hi, int grid_points) const {
  std::vector<double> roots;
  if (degree() < 1 || !(hi > lo)) return roots;
  const int n = std::max(grid_points, 2);
  const double step = (hi - lo) / (n - 1);
  double x_prev = lo;
  double f_prev = (*this)(lo);
  if (f_prev == 0.0) roots.push_back(lo);
  for (int i = 1; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + i * step;
    const double f = (*this)(x);
    if (f == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && std::signbit(f) != std::signbit(f_prev)) {
      double a = x_prev, b = x, fa = f_prev;
      for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = (*this)(m);
        if (fm == 0.0) { a = b = m; break; }
        if (std::signbit(fm) == std::signbit(fa)) { a = m; fa = fm; } else { b = m; }
      }
      roots.push_back(0.5 * (a + b));
    }
    x_prev = x;
    f_prev = f;
  }
  return roots;
}

double Polynomial::max_abs_on(double lo, double hi, int grid_points) const {
  if (hi < lo) std::swap(lo, hi);
  double best = std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
  if (degree() < 1 || hi == lo) return best;
  const int n = std::max(grid_points, 2);
  const double step = (hi - lo) / (n - 1);
  for (int i = 1; i < n - 1; ++i) best = std::max(best, std::abs((*this)(lo + i * step)));
  for (double r : derivative().roots_in(lo, hi, n)) best = std::max(best, std::abs((*this)(r)));
  return best;
}

}  // namespace omtube
