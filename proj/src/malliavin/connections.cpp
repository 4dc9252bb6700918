#include "pathlab/malliavin/connections.hpp"

#include <stdexcept>

namespace pathlab::malliavin {

std::vector<MatN> curvature_matrices(const AdaptedProcess& k, const PathContext& ctx) {
  if (k.steps() != ctx.steps() || k.dim() != ctx.dim())
    throw std::invalid_argument("process and path have different shapes");
  return sde::running_curvature(ctx, k.values());
}

AdaptedProcess markovian_connection(std::span<const MatN> a, const AdaptedProcess& h, std::span<const VecN> dh) {
  if (!h.deterministic() && dh.empty())
    throw std::invalid_argument("pathwise process needs a derivative oracle for its rate");
  if (!dh.empty() && static_cast<int>(dh.size()) < h.steps())
    throw std::invalid_argument("derivative oracle is shorter than the process");
  std::vector<VecN> r(h.steps());
  for (int j = 0; j < h.steps(); ++j) {
    r[j] = a[j] * h.rate(j);
    if (!dh.empty()) r[j] += dh[j];
  }
  return AdaptedProcess::from_rates(std::move(r), h.dt(), Provenance::kPathwise);
}

AdaptedProcess markovian_connection(const AdaptedProcess& k, const AdaptedProcess& h, const PathContext& ctx,
                                    std::span<const VecN> dh) {
  if (ctx.flat() && dh.empty()) {
    if (!h.deterministic()) throw std::invalid_argument("pathwise process needs a derivative oracle for its rate");
    return AdaptedProcess(h.dim(), h.steps(), h.dt(), Provenance::kDeterministic);
  }
  const std::vector<MatN> a = curvature_matrices(k, ctx);
  return markovian_connection(a, h, dh);
}

AdaptedProcess cartan_connection(const AdaptedProcess& k, const AdaptedProcess& h, const PathContext& ctx,
                                 std::span<const VecN> dh) {
  if (k.steps() != ctx.steps() || h.steps() != ctx.steps())
    throw std::invalid_argument("process and path have different shapes");
  if (h.deterministic() && dh.empty()) return AdaptedProcess(h.dim(), h.steps(), h.dt(), Provenance::kDeterministic);
  if (dh.empty()) throw std::invalid_argument("pathwise process needs a derivative oracle for its rate");
  return AdaptedProcess::from_rates(std::vector<VecN>(dh.begin(), dh.begin() + h.steps()), h.dt(),
                                    Provenance::kPathwise);
}

// Every catalog model has parallel Ricci, so the (nabla Ric)(v, w) term is
// identically zero and is not assembled.
std::vector<VecN> dv_hat_dot(const AdaptedProcess& w, std::span<const MatN> a, const PathContext& ctx) {
  if (!w.deterministic()) throw std::invalid_argument("hat derivative is only available for deterministic w");
  std::vector<VecN> out(w.steps(), VecN::Zero(w.dim()));
  if (ctx.flat()) return out;
  for (int k = 0; k < w.steps(); ++k) {
    const VecN wbar = 0.5 * (w.value(k) + w.value(k + 1));
    const MatN& ric = ctx.ricci(k);
    out[k] = ric * (a[k] * wbar) - a[k] * (ric * wbar);
  }
  return out;
}

std::vector<VecN> dv_hat_dot(const AdaptedProcess& v, const AdaptedProcess& w, const PathContext& ctx) {
  return dv_hat_dot(w, curvature_matrices(v, ctx), ctx);
}

AdaptedProcess connection_of_hat(const AdaptedProcess& v, const AdaptedProcess& w, const PathContext& ctx) {
  if (!w.deterministic()) throw std::invalid_argument("hat connection needs a deterministic w");
  if (ctx.flat()) return AdaptedProcess(w.dim(), w.steps(), w.dt(), Provenance::kDeterministic);
  const std::vector<MatN> a = curvature_matrices(v, ctx);
  const std::vector<VecN> d = dv_hat_dot(w, a, ctx);
  return markovian_connection(a, hat(w, ctx), d);
}

AdaptedProcess modified_connection(const AdaptedProcess& v, const AdaptedProcess& w, const PathContext& ctx) {
  return hat_inverse(connection_of_hat(v, w, ctx), ctx);
}

std::pair<double, double> error_norms(const PhiProfile& phi, const PathContext& ctx) {
  if (ctx.flat()) return {0.0, 0.0};
  const int n = ctx.dim();
  const int m = ctx.steps();
  std::vector<VecN> first(m, VecN::Zero(n)), second(m, VecN::Zero(n));
  for (int a = 0; a < n; ++a) {
    const AdaptedProcess va = deterministic_process(phi, VecN::Unit(n, a));
    const std::vector<MatN> A = curvature_matrices(va, ctx);
    const AdaptedProcess vh = hat(va, ctx);
    const std::vector<VecN> d = dv_hat_dot(va, A, ctx);
    for (int j = 0; j < m; ++j) {
      first[j] += A[j] * va.rate(j);
      second[j] += A[j] * vh.rate(j) + d[j];
    }
  }
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < m; ++j) {
    s1 += first[j].squaredNorm();
    s2 += second[j].squaredNorm();
  }
  return {s1 * ctx.dt(), s2 * ctx.dt()};
}

}  // namespace pathlab::malliavin
