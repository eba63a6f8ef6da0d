#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace omtube {

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of f on [a, b]; stops when the
/// bracket is narrower than `tol`. Each interior point is evaluated once.
template <typename F>
ScalarMinimum golden_section_minimize(F&& f, double a, double b, double tol, int max_iterations = 200) {
  constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  if (b < a) std::swap(a, b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iterations && (b - a) > tol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc < fd ? ScalarMinimum{c, fc, evals} : ScalarMinimum{d, fd, evals};
}

/// n points geometrically spaced over [lo, hi] (lo > 0), endpoints included.
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// n points uniformly spaced over [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = hi;
  return g;
}

}  // namespace omtube
