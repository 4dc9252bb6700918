#pragma once

#include <span>
#include <vector>

#include "pathlab/sde/frame_path.hpp"

namespace pathlab::sde {

using geometry::FrameCurvature;

/* Per-path geometry cache: the frame curvature and Ricci transform at every
   knot, computed once and shared by every downstream formula. */
class PathContext {
 public:
  explicit PathContext(const FramePath& path);

  const FramePath& path() const { return *path_; }
  const ManifoldModel& model() const { return path_->model(); }
  int dim() const { return path_->dim(); }
  int steps() const { return path_->steps(); }
  double dt() const { return path_->grid().dt(); }
  bool flat() const { return flat_; }

  const FrameCurvature& curvature(int i) const { return curv_[i]; }
  const MatN& ricci(int i) const { return ricci_[i]; }
  VecN increment(int i) const { return path_->increment(i); }

 private:
  const FramePath* path_;
  bool flat_;
  std::vector<FrameCurvature> curv_;
  std::vector<MatN> ricci_;
};

// Left-endpoint sums sum_i <a_i, dW_i>; the integrand must be adapted (a_i
// may depend on states[0..i] only).  Uses the first m entries.
double ito_integral(const FramePath& path, std::span<const VecN> integrand);
VecN ito_integral(const FramePath& path, std::span<const MatN> integrand);

// Midpoint rule sum_i <(a_i + a_{i+1})/2, dW_i>; needs m + 1 entries.
double stratonovich_integral(const FramePath& path, std::span<const VecN> integrand);
VecN stratonovich_integral(const FramePath& path, std::span<const MatN> integrand);

// Stratonovich increment of A_t = int R(o dW, k) over step j:
// B_j = (R_j(dW_j, k_j) + R_{j+1}(dW_j, k_{j+1})) / 2.
MatN curvature_increment(const PathContext& ctx, int j, const VecN& k_j, const VecN& k_next);

// Running curvature matrices A_0 = 0, ..., A_m (antisymmetric).
std::vector<MatN> running_curvature(const PathContext& ctx, std::span<const VecN> k);

}  // namespace pathlab::sde
