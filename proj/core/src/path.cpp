#include "omtube/path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "omtube/error.hpp"

namespace omtube {

Path::Path(double t0, double dt, std::vector<double> values)
    : t0_(t0), dt_(dt), values_(std::move(values)) {
  if (!std::isfinite(t0_) || !(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw Error(ErrorKind::InvalidInput, "path needs finite t0 and dt > 0");
  }
  if (values_.empty()) throw Error(ErrorKind::InvalidInput, "path needs at least one value");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "path values must be finite");
  }
}

double Path::at(double t) const noexcept {
  if (values_.size() == 1) return values_.front();
  const double s = (t - t0_) / dt_;
  if (s <= 0.0) return values_.front();
  const auto last = static_cast<double>(values_.size() - 1);
  if (s >= last) return values_.back();
  const auto i = static_cast<std::size_t>(s);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[std::min(i + 1, values_.size() - 1)];
}

Path Path::prefix(std::size_t n) const {
  const std::size_t count = std::min(n + 1, values_.size());
  return Path(t0_, dt_, std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count)));
}

double Path::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double Path::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

Path straight_line(double a, double b, double T, std::size_t n) {
  if (n == 0 || !(T > 0.0)) throw Error(ErrorKind::InvalidInput, "straight line needs n >= 1 and T > 0");
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n);
    v[i] = a + (b - a) * s;
  }
  v.back() = b;
  return Path(0.0, T / static_cast<double>(n), std::move(v));
}

void write_path_csv(std::ostream& out, const Path& path) {
  out << "t,x\n" << std::setprecision(17);
  for (std::size_t i = 0; i < path.size(); ++i) out << path.time(i) << ',' << path[i] << '\n';
}

void write_path_csv(const std::string& filename, const Path& path) {
  std::ofstream out(filename);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + filename + " for writing");
  write_path_csv(out, path);
}

Path read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidInput, "empty path file");
  if (line.rfind("t,x", 0) != 0) throw Error(ErrorKind::InvalidInput, "path CSV must start with header t,x");
  std::vector<double> ts, xs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::InvalidInput, "malformed path row: " + line);
    try {
      ts.push_back(std::stod(line.substr(0, comma)));
      xs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, "malformed path row: " + line);
    }
  }
  if (ts.size() < 2) throw Error(ErrorKind::InvalidInput, "path CSV needs at least two rows");
  const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double expected = ts.front() + static_cast<double>(i) * dt;
    if (std::abs(ts[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw Error(ErrorKind::InvalidInput, "path CSV time grid is not uniform");
    }
  }
  return Path(ts.front(), dt, std::move(xs));
}

Path read_path_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + filename);
  return read_path_csv(in);
}

}  // namespace omtube
