#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "pathlab/geometry/manifold.hpp"

namespace pathlab::sde {

using geometry::ManifoldModel;
using geometry::PointFrame;

class OffGridTime : public std::invalid_argument {
 public:
  OffGridTime(double t, double dt);
  double time;
};

class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const { return T_; }
  int steps() const { return m_; }
  double dt() const { return dt_; }
  double knot(int i) const { return i * dt_; }
  // Knot index of t; throws OffGridTime when t is not a knot.
  int index_of(double t) const;

 private:
  double T_;
  int m_;
  double dt_;
};

/* One discrete horizontal Brownian path: states[i+1] = exp_map(states[i], dW_i)
   with dW_i ~ N(0, 2 dt I_n) (generator Delta, not Delta/2).  Storage is
   contiguous with the true ambient/manifold dimensions. */
class FramePath {
 public:
  FramePath(std::shared_ptr<const ManifoldModel> model, TimeGrid grid);

  const ManifoldModel& model() const { return *model_; }
  const std::shared_ptr<const ManifoldModel>& model_ptr() const { return model_; }
  const TimeGrid& grid() const { return grid_; }
  int steps() const { return grid_.steps(); }
  int dim() const { return n_; }
  int ambient_dim() const { return amb_; }

  Eigen::Map<const Eigen::VectorXd> point(int i) const {
    return Eigen::Map<const Eigen::VectorXd>(points_.data() + static_cast<std::size_t>(i) * amb_, amb_);
  }
  Eigen::Map<const Eigen::MatrixXd> frame(int i) const {
    return Eigen::Map<const Eigen::MatrixXd>(frames_.data() + static_cast<std::size_t>(i) * amb_ * n_, amb_, n_);
  }
  Eigen::Map<const Eigen::VectorXd> increment(int i) const {
    return Eigen::Map<const Eigen::VectorXd>(noise_.data() + static_cast<std::size_t>(i) * n_, n_);
  }
  PointFrame state(int i) const;
  // W_{t_i} = sum_{j<i} dW_j.
  VecN noise_sum(int i) const;

  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  int reorthonormalizations = 0;

  std::span<const double> raw_points() const { return points_; }
  std::span<const double> raw_frames() const { return frames_; }
  std::span<const double> raw_noise() const { return noise_; }

 private:
  friend FramePath develop_path(std::shared_ptr<const ManifoldModel>, const VecA&, const TimeGrid&,
                                std::span<const double>);
  friend FramePath simulate_path(std::shared_ptr<const ManifoldModel>, const VecA&, const TimeGrid&,
                                 std::uint64_t, std::uint64_t);
  void roll(const VecA& base);

  std::shared_ptr<const ManifoldModel> model_;
  TimeGrid grid_;
  int n_;
  int amb_;
  std::vector<double> points_;
  std::vector<double> frames_;
  std::vector<double> noise_;
};

// Roll the manifold along prescribed increments (m * n values, row per step).
FramePath develop_path(std::shared_ptr<const ManifoldModel> model, const VecA& base, const TimeGrid& grid,
                       std::span<const double> increments);

FramePath simulate_path(std::shared_ptr<const ManifoldModel> model, const VecA& base, const TimeGrid& grid,
                        std::uint64_t master_seed, std::uint64_t path_index);

/* Matrix of P_{t_i} = U_0 U_{t_i}^{-1} read in two frames: the basis at
   gamma_{t_i} is u_0 carried along the minimising geodesic from the base
   point, so the result is the holonomy around "path then geodesic back".
   It is the identity on flat models and at i = 0. */
MatN parallel_transport_to_base(const FramePath& path, int i);

}  // namespace pathlab::sde
