#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace omtube {

/// Uniformly gridded scalar time series; sample i sits at t0 + i*dt.
class Path {
 public:
  Path() = default;
  /// Throws InvalidInput unless dt > 0, values.size() >= 1 and all values finite.
  Path(double t0, double dt, std::vector<double> values);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return values_.size(); }
  /// Number of steps N (size() - 1).
  std::size_t steps() const noexcept { return values_.empty() ? 0 : values_.size() - 1; }
  double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
  double end_time() const noexcept { return time(steps()); }
  double duration() const noexcept { return static_cast<double>(steps()) * dt_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  /// Linear interpolation; t is clamped to [t0, end_time].
  double at(double t) const noexcept;

  /// Prefix x_0..x_n (inclusive).
  Path prefix(std::size_t n) const;

  double min_value() const;
  double max_value() const;

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> values_;
};

/// Straight line from a to b over [0, T] with n steps.
Path straight_line(double a, double b, double T, std::size_t n);

/// `t,x` header and one row per node, 17 significant digits.
void write_path_csv(std::ostream& out, const Path& path);
void write_path_csv(const std::string& filename, const Path& path);
/// Reads a `t,x` CSV; the grid must be uniform to 1e-9 relative.
Path read_path_csv(std::istream& in);
Path read_path_csv(const std::string& filename);

}  // namespace omtube
