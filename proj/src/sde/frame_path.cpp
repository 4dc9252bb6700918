#include "pathlab/sde/frame_path.hpp"

#include <cmath>
#include <string>

#include "pathlab/sde/rng.hpp"

namespace pathlab::sde {

namespace {

std::string describe_time(double t, double dt) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "time not on grid: t = %.10g is not a multiple of dt = %.10g", t, dt);
  return buf;
}

}  // namespace

OffGridTime::OffGridTime(double t, double dt) : std::invalid_argument(describe_time(t, dt)), time(t) {}

TimeGrid::TimeGrid(double horizon, int steps) : T_(horizon), m_(steps), dt_(horizon / steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("grid horizon must be positive");
  if (steps < 2) throw std::invalid_argument("grid needs at least 2 steps");
}

int TimeGrid::index_of(double t) const {
  const double x = t / dt_;
  const double k = std::round(x);
  if (!std::isfinite(x) || std::abs(x - k) > 1e-7 || k < 0 || k > m_) throw OffGridTime(t, dt_);
  return static_cast<int>(k);
}

FramePath::FramePath(std::shared_ptr<const ManifoldModel> model, TimeGrid grid)
    : model_(std::move(model)), grid_(grid), n_(model_->dim()), amb_(model_->ambient_dim()) {
  const std::size_t m = static_cast<std::size_t>(grid_.steps());
  points_.resize((m + 1) * amb_);
  frames_.resize((m + 1) * amb_ * n_);
  noise_.resize(m * n_);
}

PointFrame FramePath::state(int i) const {
  PointFrame pf;
  pf.point = point(i);
  pf.frame = frame(i);
  return pf;
}

VecN FramePath::noise_sum(int i) const {
  VecN w = VecN::Zero(n_);
  for (int j = 0; j < i; ++j) w += increment(j);
  return w;
}

void FramePath::roll(const VecA& base) {
  const ManifoldModel& M = *model_;
  PointFrame pf = M.identity_frame(base);
  VecA x = pf.point;
  FrameMat u = pf.frame;
  const int m = grid_.steps();
  const std::size_t fsz = static_cast<std::size_t>(amb_) * n_;
  for (int i = 0;; ++i) {
    std::copy(x.data(), x.data() + amb_, points_.data() + static_cast<std::size_t>(i) * amb_);
    // FrameMat storage is column-major with stride amb_.
    std::copy(u.data(), u.data() + fsz, frames_.data() + i * fsz);
    if (i == m) break;
    VecN xi = Eigen::Map<const Eigen::VectorXd>(noise_.data() + static_cast<std::size_t>(i) * n_, n_);
    if (M.step(x, u, xi)) ++reorthonormalizations;
  }
}

FramePath develop_path(std::shared_ptr<const ManifoldModel> model, const VecA& base, const TimeGrid& grid,
                       std::span<const double> increments) {
  FramePath path(std::move(model), grid);
  if (increments.size() != path.noise_.size())
    throw std::invalid_argument("increment count does not match grid and dimension");
  std::copy(increments.begin(), increments.end(), path.noise_.begin());
  path.roll(base);
  return path;
}

FramePath simulate_path(std::shared_ptr<const ManifoldModel> model, const VecA& base, const TimeGrid& grid,
                        std::uint64_t master_seed, std::uint64_t path_index) {
  FramePath path(std::move(model), grid);
  path.seed = master_seed;
  path.index = path_index;
  const NormalStream rng(master_seed, path_index);
  const double sd = std::sqrt(2.0 * grid.dt());
  const int n = path.n_;
  for (int i = 0; i < grid.steps(); ++i) {
    double* out = path.noise_.data() + static_cast<std::size_t>(i) * n;
    rng.step_normals(static_cast<std::uint32_t>(i), n, out);
    for (int a = 0; a < n; ++a) out[a] *= sd;
  }
  path.roll(base);
  return path;
}

MatN parallel_transport_to_base(const FramePath& path, int i) {
  if (i < 0 || i > path.steps()) throw std::out_of_range("knot index out of range");
  const ManifoldModel& M = path.model();
  const int n = path.dim();
  if (i == 0) return MatN::Identity(n, n);
  const PointFrame start = path.state(0);
  const VecA target = path.point(i);
  const VecA v = M.log_map(start.point, target);
  // Frame coordinates of the initial velocity, using the metric of the base frame.
  VecN xi(n);
  for (int a = 0; a < n; ++a) {
    VecA col = start.frame.col(a);
    xi[a] = M.inner(col, v);
  }
  const PointFrame ref = M.exp_map(start, xi);
  const PointFrame here = path.state(i);
  MatN p(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      VecA ua = here.frame.col(a);
      VecA eb = ref.frame.col(b);
      p(a, b) = M.inner(ua, eb);
    }
  return p;
}

}  // namespace pathlab::sde
