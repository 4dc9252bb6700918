#include "pathlab/pathfunc/cylinder.hpp"

#include <stdexcept>

namespace pathlab::pathfunc {

CylinderFunction::CylinderFunction(std::vector<double> times, BasePtr base)
    : times_(std::move(times)), base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("cylinder function needs a base function");
  if (times_.empty()) throw std::invalid_argument("cylinder function needs at least one time");
  if (static_cast<int>(times_.size()) != base_->slots())
    throw std::invalid_argument("number of times does not match the base function's slots");
  for (std::size_t j = 0; j < times_.size(); ++j) {
    if (!(times_[j] > 0.0)) throw std::invalid_argument("cylinder times must be positive");
    if (j && !(times_[j] > times_[j - 1])) throw std::invalid_argument("cylinder times must increase strictly");
  }
}

std::vector<int> CylinderFunction::knots(const sde::TimeGrid& grid) const {
  std::vector<int> k;
  for (double t : times_) k.push_back(grid.index_of(t));
  return k;
}

namespace {

CylinderJet jet_at(const CylinderFunction& F, const FramePath& path, std::span<const VecA> pts, JetOrder order,
                   std::vector<int> knots) {
  const int k = F.k();
  const int n = path.dim();
  const auto& M = path.model();
  const BaseFunction& f = F.base();
  CylinderJet jet;
  jet.knots = std::move(knots);
  jet.value = f.value(pts);
  if (order == JetOrder::kValue) return jet;
  std::vector<FrameMat> frames;
  std::vector<VecA> grads;
  for (int j = 0; j < k; ++j) {
    frames.emplace_back(path.frame(jet.knots[j]));
    grads.push_back(f.gradient(pts, j));
    jet.grad.push_back(frames[j].transpose() * grads[j]);
  }
  if (order == JetOrder::kGradient) return jet;
  jet.hess.assign(static_cast<std::size_t>(k) * k, MatN::Zero(n, n));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const MatA h = f.hessian(pts, i, j);
      if (i == j) {
        jet.hess[i * k + i] = M.frame_hessian(pts[i], frames[i], grads[i], h);
      } else {
        jet.hess[i * k + j] = frames[i].transpose() * h * frames[j];
        jet.hess[j * k + i] = jet.hess[i * k + j].transpose();
      }
    }
  return jet;
}

}  // namespace

CylinderJet make_jet(const CylinderFunction& F, const FramePath& path, JetOrder order) {
  std::vector<int> knots = F.knots(path.grid());
  std::vector<VecA> pts;
  for (int kk : knots) pts.emplace_back(path.point(kk));
  return jet_at(F, path, pts, order, std::move(knots));
}

CylinderJet make_shifted_jet(const CylinderFunction& F, const FramePath& path, std::span<const VecN> shifts,
                             JetOrder order) {
  if (!path.model().is_flat()) throw std::invalid_argument("path shifts are only defined on flat models");
  std::vector<int> knots = F.knots(path.grid());
  std::vector<VecA> pts;
  for (int kk : knots) {
    VecA y = path.point(kk);
    y += path.frame(kk) * shifts[kk];
    pts.push_back(y);
  }
  return jet_at(F, path, pts, order, std::move(knots));
}

double evaluate(const CylinderFunction& F, const FramePath& path) { return make_jet(F, path, JetOrder::kValue).value; }

VecN parallel_gradient(const CylinderJet& jet, int knot) {
  VecN g = VecN::Zero(jet.grad.front().size());
  for (int j = 0; j < jet.k(); ++j)
    if (jet.knots[j] > knot) g += jet.grad[j];
  return g;
}

VecN parallel_gradient(const CylinderFunction& F, const FramePath& path, int knot) {
  return parallel_gradient(make_jet(F, path, JetOrder::kGradient), knot);
}

VecN phi_gradient(const CylinderJet& jet, const PhiProfile& phi) {
  VecN g = VecN::Zero(jet.grad.front().size());
  for (int j = 0; j < jet.k(); ++j) g += phi[jet.knots[j]] * jet.grad[j];
  return g;
}

VecN phi_gradient(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi) {
  return phi_gradient(make_jet(F, path, JetOrder::kGradient), phi);
}

double directional_derivative(const CylinderJet& jet, std::span<const VecN> h) {
  double s = 0.0;
  for (int j = 0; j < jet.k(); ++j) s += jet.grad[j].dot(h[jet.knots[j]]);
  return s;
}

double l2_phi_hessian(const CylinderJet& jet, const PhiProfile& phi, const VecN& v, const VecN& w) {
  double s = 0.0;
  const int k = jet.k();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) s += phi[jet.knots[i]] * phi[jet.knots[j]] * v.dot(jet.block(i, j) * w);
  return s;
}

double l2_phi_hessian(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi, const VecN& v,
                      const VecN& w) {
  return l2_phi_hessian(make_jet(F, path), phi, v, w);
}

CurvatureSums::CurvatureSums(const PathContext& ctx, const PhiProfile& phi, std::span<const int> knots,
                             bool with_stratonovich)
    : n_(ctx.dim()), k_(static_cast<int>(knots.size())), zero_(ctx.flat()) {
  const MatN zero = MatN::Zero(n_, n_);
  direct_.assign(static_cast<std::size_t>(n_) * k_, zero);
  connect_.assign(direct_.size(), zero);
  if (with_stratonovich) strat_.assign(direct_.size(), zero);
  if (zero_) return;
  for (int a = 0; a < n_; ++a) {
    const VecN e = VecN::Unit(n_, a);
    MatN A = zero, Z = zero, S = zero;
    int next = 0;
    for (int j = 0;; ++j) {
      while (next < k_ && knots[next] == j) {
        direct_[a * k_ + next] = A * phi[j];
        connect_[a * k_ + next] = Z;
        if (with_stratonovich) strat_[a * k_ + next] = S;
        ++next;
      }
      if (next == k_) break;
      const VecN dw = ctx.increment(j);
      const MatN B = 0.5 * (phi[j] * ctx.curvature(j)(dw, e) + phi[j + 1] * ctx.curvature(j + 1)(dw, e));
      Z += A * (phi[j + 1] - phi[j]);
      if (with_stratonovich) S += B * phi[j + 1];
      A += B;
    }
  }
}

namespace {

// sum_i g_i^T (sum_a v_a X(a,i)) w
template <class Pick>
double contract(const CylinderJet& jet, int n, const VecN& v, const VecN& w, Pick pick) {
  double s = 0.0;
  for (int i = 0; i < jet.k(); ++i) {
    VecN acc = VecN::Zero(n);
    for (int a = 0; a < n; ++a)
      if (v[a] != 0.0) acc += v[a] * (pick(a, i) * w);
    s += jet.grad[i].dot(acc);
  }
  return s;
}

}  // namespace

double markovian_correction(const CylinderJet& jet, const CurvatureSums& sums, const VecN& v, const VecN& w) {
  if (sums.zero()) return 0.0;
  return contract(jet, sums.dim(), v, w, [&](int a, int i) { return MatN(sums.direct(a, i) - sums.connect(a, i)); });
}

double stratonovich_correction(const CylinderJet& jet, const CurvatureSums& sums, const VecN& v, const VecN& w) {
  if (sums.zero()) return 0.0;
  return contract(jet, sums.dim(), v, w, [&](int a, int i) { return sums.strat(a, i); });
}

double connection_derivative(const CylinderJet& jet, const CurvatureSums& sums, const VecN& v, const VecN& w) {
  if (sums.zero()) return 0.0;
  return contract(jet, sums.dim(), v, w, [&](int a, int i) { return sums.connect(a, i); });
}

double second_derivative(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi, const VecN& v,
                         const VecN& w) {
  double s = l2_phi_hessian(jet, phi, v, w);
  if (!sums.zero()) s += contract(jet, sums.dim(), v, w, [&](int a, int i) { return sums.direct(a, i); });
  return s;
}

double markovian_phi_hessian(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi, const VecN& v,
                             const VecN& w) {
  return l2_phi_hessian(jet, phi, v, w) +
         0.5 * (markovian_correction(jet, sums, v, w) + markovian_correction(jet, sums, w, v));
}

double markovian_phi_hessian(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi, const VecN& v,
                             const VecN& w) {
  const CylinderJet jet = make_jet(F, path);
  const PathContext ctx(path);
  const CurvatureSums sums(ctx, phi, jet.knots);
  return markovian_phi_hessian(jet, sums, phi, v, w);
}

MatN phi_hessian_matrix(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi) {
  const int n = sums.dim();
  MatN h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      h(a, b) = h(b, a) = markovian_phi_hessian(jet, sums, phi, VecN::Unit(n, a), VecN::Unit(n, b));
  return h;
}

double phi_laplacian(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi) {
  double s = 0.0;
  for (int a = 0; a < sums.dim(); ++a) {
    const VecN e = VecN::Unit(sums.dim(), a);
    s += markovian_phi_hessian(jet, sums, phi, e, e);
  }
  return s;
}

double phi_laplacian(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi) {
  const CylinderJet jet = make_jet(F, path);
  const PathContext ctx(path);
  const CurvatureSums sums(ctx, phi, jet.knots);
  return phi_laplacian(jet, sums, phi);
}

double l2_phi_laplacian(const CylinderJet& jet, const PhiProfile& phi) {
  const int n = jet.grad.front().size();
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    const VecN e = VecN::Unit(n, a);
    s += l2_phi_hessian(jet, phi, e, e);
  }
  return s;
}

}  // namespace pathlab::pathfunc
