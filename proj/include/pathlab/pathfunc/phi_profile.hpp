#pragma once

#include <span>
#include <vector>

#include "pathlab/sde/frame_path.hpp"

namespace pathlab::pathfunc {

using sde::TimeGrid;

/* A test function phi on [0,T], piecewise linear between grid knots with
   phi(0) = 0.  ||phi||^2 = sum_i (phi_{i+1} - phi_i)^2 / dt is exact for the
   piecewise-linear interpolant. */
class PhiProfile {
 public:
  PhiProfile(std::vector<double> knot_values, double dt);

  // phi(s) = s/t0 for s <= t0, then 1.
  static PhiProfile ramp(const TimeGrid& grid, double t0);
  // phi(s) = sin(pi s / (2T)) sampled at the knots.
  static PhiProfile sine(const TimeGrid& grid);
  // Linear interpolation through (0,0) and the given (time, value) pairs,
  // held constant after the last time.  Times must be grid knots.
  static PhiProfile piecewise(const TimeGrid& grid, std::span<const double> times, std::span<const double> values);

  int steps() const { return static_cast<int>(values_.size()) - 1; }
  double dt() const { return dt_; }
  double operator[](int i) const { return values_[i]; }
  double rate(int i) const { return (values_[i + 1] - values_[i]) / dt_; }
  std::span<const double> values() const { return values_; }
  double norm2() const;
  PhiProfile scaled(double c) const;

 private:
  std::vector<double> values_;
  double dt_;
};

}  // namespace pathlab::pathfunc
