#include "pathlab/sde/integrals.hpp"

#include <stdexcept>

namespace pathlab::sde {

PathContext::PathContext(const FramePath& path) : path_(&path), flat_(path.model().is_flat()) {
  const int m = path.steps();
  const int n = path.dim();
  curv_.reserve(m + 1);
  ricci_.reserve(m + 1);
  if (flat_) {
    curv_.assign(m + 1, FrameCurvature(n));
    ricci_.assign(m + 1, MatN::Zero(n, n));
    return;
  }
  const ManifoldModel& M = path.model();
  for (int i = 0; i <= m; ++i) {
    VecA x = path.point(i);
    FrameMat u = path.frame(i);
    curv_.push_back(M.frame_curvature(x, u));
    ricci_.push_back(curv_.back().ricci());
  }
}

namespace {

void need(std::size_t have, std::size_t want) {
  if (have < want) throw std::invalid_argument("integrand shorter than the time grid");
}

}  // namespace

double ito_integral(const FramePath& path, std::span<const VecN> a) {
  const int m = path.steps();
  need(a.size(), m);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += a[i].dot(path.increment(i));
  return s;
}

VecN ito_integral(const FramePath& path, std::span<const MatN> a) {
  const int m = path.steps();
  need(a.size(), m);
  VecN s = VecN::Zero(path.dim());
  for (int i = 0; i < m; ++i) s.noalias() += a[i] * path.increment(i);
  return s;
}

double stratonovich_integral(const FramePath& path, std::span<const VecN> a) {
  const int m = path.steps();
  need(a.size(), m + 1);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += (0.5 * (a[i] + a[i + 1])).dot(path.increment(i));
  return s;
}

VecN stratonovich_integral(const FramePath& path, std::span<const MatN> a) {
  const int m = path.steps();
  need(a.size(), m + 1);
  VecN s = VecN::Zero(path.dim());
  for (int i = 0; i < m; ++i) s.noalias() += (0.5 * (a[i] + a[i + 1])) * path.increment(i);
  return s;
}

MatN curvature_increment(const PathContext& ctx, int j, const VecN& k_j, const VecN& k_next) {
  const VecN dw = ctx.increment(j);
  return 0.5 * (ctx.curvature(j)(dw, k_j) + ctx.curvature(j + 1)(dw, k_next));
}

std::vector<MatN> running_curvature(const PathContext& ctx, std::span<const VecN> k) {
  const int m = ctx.steps();
  const int n = ctx.dim();
  need(k.size(), m + 1);
  std::vector<MatN> a(m + 1, MatN::Zero(n, n));
  if (ctx.flat()) return a;
  for (int j = 0; j < m; ++j) a[j + 1] = a[j] + curvature_increment(ctx, j, k[j], k[j + 1]);
  return a;
}

}  // namespace pathlab::sde
