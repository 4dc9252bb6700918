#include "pathlab/pathfunc/phi_profile.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pathlab::pathfunc {

PhiProfile::PhiProfile(std::vector<double> knot_values, double dt) : values_(std::move(knot_values)), dt_(dt) {
  if (values_.size() < 3) throw std::invalid_argument("profile needs at least two steps");
  if (values_.front() != 0.0) throw std::invalid_argument("profile must vanish at time 0");
  if (!(dt > 0.0)) throw std::invalid_argument("profile step must be positive");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("profile values must be finite");
}

PhiProfile PhiProfile::ramp(const TimeGrid& grid, double t0) {
  const int k = grid.index_of(t0);
  if (k == 0) throw std::invalid_argument("ramp time must be positive");
  std::vector<double> v(grid.steps() + 1, 1.0);
  for (int i = 0; i < k; ++i) v[i] = static_cast<double>(i) / k;
  return PhiProfile(std::move(v), grid.dt());
}

PhiProfile PhiProfile::sine(const TimeGrid& grid) {
  std::vector<double> v(grid.steps() + 1);
  for (int i = 0; i <= grid.steps(); ++i)
    v[i] = std::sin(0.5 * std::numbers::pi * i / grid.steps());
  v[0] = 0.0;
  return PhiProfile(std::move(v), grid.dt());
}

PhiProfile PhiProfile::piecewise(const TimeGrid& grid, std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.empty())
    throw std::invalid_argument("piecewise profile needs matching, non-empty times and values");
  std::vector<int> k{0};
  std::vector<double> y{0.0};
  for (std::size_t j = 0; j < times.size(); ++j) {
    const int idx = grid.index_of(times[j]);
    if (idx <= k.back()) throw std::invalid_argument("piecewise profile times must increase from 0");
    k.push_back(idx);
    y.push_back(values[j]);
  }
  std::vector<double> v(grid.steps() + 1, y.back());
  for (std::size_t s = 0; s + 1 < k.size(); ++s)
    for (int i = k[s]; i <= k[s + 1]; ++i)
      v[i] = y[s] + (y[s + 1] - y[s]) * static_cast<double>(i - k[s]) / (k[s + 1] - k[s]);
  return PhiProfile(std::move(v), grid.dt());
}

double PhiProfile::norm2() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    const double d = values_[i + 1] - values_[i];
    s += d * d;
  }
  return s / dt_;
}

PhiProfile PhiProfile::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return PhiProfile(std::move(v), dt_);
}

}  // namespace pathlab::pathfunc
