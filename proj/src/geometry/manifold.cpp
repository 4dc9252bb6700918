#include "pathlab/geometry/manifold.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pathlab::geometry {

namespace {

constexpr double kDriftTolerance = 1e-9;

bool curved(const Factor& f) {
  return (f.kind == FactorKind::kSphere || f.kind == FactorKind::kHyperbolic) && f.dim >= 2;
}

double block_inner(const Factor& f, const double* a, const double* b) {
  const int m = f.ambient_dim();
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += a[i] * b[i];
  if (f.kind == FactorKind::kHyperbolic) s -= 2.0 * a[m - 1] * b[m - 1];
  return s;
}

double wrap(double x, double side) {
  double y = x - side * std::floor(x / side);
  if (y >= side) y -= side;
  return y;
}

std::string fmt_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

int Factor::ambient_dim() const {
  return (kind == FactorKind::kSphere || kind == FactorKind::kHyperbolic) ? dim + 1 : dim;
}

double Factor::curvature() const {
  if (dim < 2) return 0.0;
  if (kind == FactorKind::kSphere) return 1.0 / (scale * scale);
  if (kind == FactorKind::kHyperbolic) return -1.0 / (scale * scale);
  return 0.0;
}

/* ---------- FrameCurvature ---------- */

void FrameCurvature::add_factor(double kappa, const MatN& projection) {
  if (count_ >= kMaxFactors) throw ModelError("too many curved factors");
  kappa_[count_] = kappa;
  proj_[count_] = projection;
  ++count_;
}

MatN FrameCurvature::operator()(const VecN& x, const VecN& y) const {
  MatN r = MatN::Zero(n_, n_);
  for (int f = 0; f < count_; ++f) {
    VecN a = proj_[f] * x;
    VecN b = proj_[f] * y;
    r.noalias() += kappa_[f] * (a * b.transpose() - b * a.transpose());
  }
  return r;
}

VecN FrameCurvature::apply(const VecN& x, const VecN& y, const VecN& w) const {
  VecN out = VecN::Zero(n_);
  for (int f = 0; f < count_; ++f) {
    VecN a = proj_[f] * x;
    VecN b = proj_[f] * y;
    out += kappa_[f] * (a * b.dot(w) - b * a.dot(w));
  }
  return out;
}

MatN FrameCurvature::ricci() const {
  MatN r = MatN::Zero(n_, n_);
  for (int f = 0; f < count_; ++f) {
    const MatN& g = proj_[f];
    r.noalias() += kappa_[f] * (g.trace() * g - g * g);
  }
  return r;
}

/* ---------- construction ---------- */

ManifoldModel ManifoldModel::euclidean(int n) {
  if (n < 1) throw ModelError("euclidean dimension must be positive");
  ManifoldModel m;
  m.factors_.push_back(Factor{FactorKind::kEuclidean, n, 1.0, {}, 0});
  m.finish();
  return m;
}

ManifoldModel ManifoldModel::flat_torus(std::vector<double> sides) {
  if (sides.empty()) throw ModelError("torus needs at least one side length");
  for (double s : sides)
    if (!(s > 0.0) || !std::isfinite(s)) throw ModelError("torus side lengths must be positive");
  ManifoldModel m;
  const int n = static_cast<int>(sides.size());
  m.factors_.push_back(Factor{FactorKind::kTorus, n, 1.0, std::move(sides), 0});
  m.finish();
  return m;
}

ManifoldModel ManifoldModel::sphere(int n, double radius) {
  if (n < 1) throw ModelError("sphere dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ModelError("sphere radius must be positive");
  ManifoldModel m;
  m.factors_.push_back(Factor{FactorKind::kSphere, n, radius, {}, 0});
  m.finish();
  return m;
}

ManifoldModel ManifoldModel::hyperbolic(int n, double scale) {
  if (n < 1) throw ModelError("hyperbolic dimension must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ModelError("hyperbolic scale must be positive");
  ManifoldModel m;
  m.factors_.push_back(Factor{FactorKind::kHyperbolic, n, scale, {}, 0});
  m.finish();
  return m;
}

ManifoldModel ManifoldModel::product(const std::vector<ManifoldModel>& parts) {
  if (parts.empty()) throw ModelError("empty product");
  ManifoldModel m;
  for (const auto& p : parts)
    for (const auto& f : p.factors_) m.factors_.push_back(f);
  m.finish();
  return m;
}

void ManifoldModel::finish() {
  dim_ = 0;
  ambient_ = 0;
  for (auto& f : factors_) {
    f.offset = ambient_;
    dim_ += f.dim;
    ambient_ += f.ambient_dim();
  }
  if (dim_ > kMaxDim) throw ModelError("manifold dimension exceeds " + std::to_string(kMaxDim));
  if (ambient_ > kMaxAmbient)
    throw ModelError("ambient dimension exceeds " + std::to_string(kMaxAmbient));
  if (static_cast<int>(factors_.size()) > kMaxFactors) throw ModelError("too many factors");
}

ManifoldModel ManifoldModel::parse(std::string_view spec) {
  std::vector<ManifoldModel> parts;
  std::string s;
  for (char c : spec)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t star = s.find('*', pos);
    if (star == std::string::npos) star = s.size();
    std::string tok = s.substr(pos, star - pos);
    std::size_t open = tok.find('(');
    if (open == std::string::npos || tok.back() != ')')
      throw ModelError("malformed model spec '" + tok + "'");
    std::string name = tok.substr(0, open);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::vector<double> args;
    std::stringstream ss(tok.substr(open + 1, tok.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ModelError("bad number '" + item + "' in model spec");
      }
    }
    auto need = [&](std::size_t k) {
      if (args.size() != k) throw ModelError("model '" + name + "' expects " + std::to_string(k) + " arguments");
    };
    auto as_dim = [&](double v) {
      if (v != std::floor(v) || v < 1) throw ModelError("dimension must be a positive integer");
      return static_cast<int>(v);
    };
    if (name == "euclidean" || name == "r") {
      need(1);
      parts.push_back(euclidean(as_dim(args[0])));
    } else if (name == "torus") {
      parts.push_back(flat_torus(args));
    } else if (name == "sphere") {
      need(2);
      parts.push_back(sphere(as_dim(args[0]), args[1]));
    } else if (name == "hyperbolic") {
      need(2);
      parts.push_back(hyperbolic(as_dim(args[0]), args[1]));
    } else {
      throw ModelError("unknown model kind '" + name + "'");
    }
    pos = star + 1;
  }
  return parts.size() == 1 ? parts.front() : product(parts);
}

std::string ManifoldModel::name() const {
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const Factor& f = factors_[i];
    if (i) out += '*';
    switch (f.kind) {
      case FactorKind::kEuclidean:
        out += "euclidean(" + std::to_string(f.dim) + ")";
        break;
      case FactorKind::kTorus: {
        out += "torus(";
        for (std::size_t k = 0; k < f.sides.size(); ++k) out += (k ? "," : "") + fmt_number(f.sides[k]);
        out += ")";
        break;
      }
      case FactorKind::kSphere:
        out += "sphere(" + std::to_string(f.dim) + "," + fmt_number(f.scale) + ")";
        break;
      case FactorKind::kHyperbolic:
        out += "hyperbolic(" + std::to_string(f.dim) + "," + fmt_number(f.scale) + ")";
        break;
    }
  }
  return out;
}

bool ManifoldModel::is_flat() const {
  for (const auto& f : factors_)
    if (curved(f)) return false;
  return true;
}

bool ManifoldModel::is_einstein(double* lambda) const {
  double first = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const double l = factors_[i].curvature() * (factors_[i].dim - 1);
    if (i == 0) first = l;
    else if (std::abs(l - first) > 1e-14 * (1.0 + std::abs(first))) return false;
  }
  if (lambda) *lambda = first;
  return true;
}

double ManifoldModel::ricci_bound() const {
  double b = 0.0;
  for (const auto& f : factors_) b = std::max(b, std::abs(f.curvature()) * (f.dim - 1));
  return b;
}

/* ---------- points and frames ---------- */

VecA ManifoldModel::default_base() const {
  VecA x = VecA::Zero(ambient_);
  for (const auto& f : factors_)
    if (f.kind == FactorKind::kSphere || f.kind == FactorKind::kHyperbolic)
      x[f.offset + f.dim] = f.scale;
  return x;
}

bool ManifoldModel::contains(const VecA& point, double tol) const {
  if (point.size() != ambient_) return false;
  if (!point.allFinite()) return false;
  for (const auto& f : factors_) {
    const double* p = point.data() + f.offset;
    switch (f.kind) {
      case FactorKind::kEuclidean:
        break;
      case FactorKind::kTorus:
        for (int i = 0; i < f.dim; ++i)
          if (p[i] < -tol || p[i] > f.sides[i] + tol) return false;
        break;
      case FactorKind::kSphere: {
        const double q = block_inner(f, p, p);
        if (std::abs(q - f.scale * f.scale) > tol * f.scale * f.scale) return false;
        break;
      }
      case FactorKind::kHyperbolic: {
        const double q = block_inner(f, p, p);
        if (std::abs(q + f.scale * f.scale) > tol * f.scale * f.scale || p[f.dim] <= 0.0) return false;
        break;
      }
    }
  }
  return true;
}

PointFrame ManifoldModel::identity_frame(const VecA& point) const {
  if (!contains(point, 1e-8)) throw ModelError("base point is not on the manifold " + name());
  PointFrame pf;
  pf.point = point;
  pf.frame = FrameMat::Zero(ambient_, dim_);
  int col = 0;
  for (const auto& f : factors_) {
    const int m = f.ambient_dim();
    if (f.kind == FactorKind::kEuclidean || f.kind == FactorKind::kTorus) {
      for (int i = 0; i < f.dim; ++i) pf.frame(f.offset + i, col + i) = 1.0;
      col += f.dim;
      continue;
    }
    // Project the ambient coordinate vectors onto the tangent space and
    // orthonormalize them in the factor metric.
    const double* x = point.data() + f.offset;
    const double sign = f.kind == FactorKind::kSphere ? 1.0 : -1.0;
    const double r2 = f.scale * f.scale;
    std::vector<VecA> basis;
    for (int c = 0; c < m && static_cast<int>(basis.size()) < f.dim; ++c) {
      VecA e = VecA::Zero(m);
      e[c] = 1.0;
      const double ex = block_inner(f, e.data(), x);
      for (int i = 0; i < m; ++i) e[i] -= sign * ex * x[i] / r2;
      for (const auto& b : basis) {
        const double eb = block_inner(f, e.data(), b.data());
        e -= eb * b;
      }
      const double nn = block_inner(f, e.data(), e.data());
      if (nn < 1e-12) continue;
      basis.push_back(e / std::sqrt(nn));
    }
    for (int k = 0; k < f.dim; ++k)
      for (int i = 0; i < m; ++i) pf.frame(f.offset + i, col + k) = basis[k][i];
    col += f.dim;
  }
  return pf;
}

double ManifoldModel::inner(const VecA& a, const VecA& b) const {
  double s = 0.0;
  for (const auto& f : factors_) s += block_inner(f, a.data() + f.offset, b.data() + f.offset);
  return s;
}

MatN ManifoldModel::gram(const PointFrame& pf) const {
  MatN g(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      VecA a = pf.frame.col(i);
      VecA b = pf.frame.col(j);
      g(i, j) = g(j, i) = inner(a, b);
    }
  return g;
}

double ManifoldModel::frame_drift(const PointFrame& pf) const {
  double d = (gram(pf) - MatN::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  for (const auto& f : factors_) {
    if (f.kind != FactorKind::kSphere && f.kind != FactorKind::kHyperbolic) continue;
    const double* x = pf.point.data() + f.offset;
    for (int k = 0; k < dim_; ++k) {
      const double t = block_inner(f, pf.frame.col(k).data() + f.offset, x) / f.scale;
      d = std::max(d, std::abs(t));
    }
  }
  return d;
}

PointFrame ManifoldModel::reorthonormalize(const PointFrame& pf) const {
  PointFrame out = pf;
  for (const auto& f : factors_) {
    if (f.kind != FactorKind::kSphere && f.kind != FactorKind::kHyperbolic) continue;
    double* x = out.point.data() + f.offset;
    const double q = block_inner(f, x, x);
    const double target = f.kind == FactorKind::kSphere ? 1.0 : -1.0;
    const double scale = f.scale / std::sqrt(q * target);
    for (int i = 0; i < f.ambient_dim(); ++i) x[i] *= scale;
    const double sign = f.kind == FactorKind::kSphere ? 1.0 : -1.0;
    const double r2 = f.scale * f.scale;
    for (int k = 0; k < dim_; ++k) {
      double* w = out.frame.col(k).data() + f.offset;
      const double wx = block_inner(f, w, x);
      for (int i = 0; i < f.ambient_dim(); ++i) w[i] -= sign * wx * x[i] / r2;
    }
  }
  // Loewdin: U <- U G^{-1/2}, the orthonormal frame closest to U.
  const MatN g = gram(out);
  Eigen::SelfAdjointEigenSolver<MatN> es(g);
  const MatN inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  out.frame = (out.frame * inv_sqrt).eval();
  return out;
}

/* ---------- geodesics ---------- */

bool ManifoldModel::step(VecA& point, FrameMat& frame, const VecN& xi) const {
  const VecA v = frame * xi;
  bool curved_step = false;
  for (const auto& f : factors_) {
    const int m = f.ambient_dim();
    double* x = point.data() + f.offset;
    const double* vf = v.data() + f.offset;
    switch (f.kind) {
      case FactorKind::kEuclidean:
        for (int i = 0; i < m; ++i) x[i] += vf[i];
        break;
      case FactorKind::kTorus:
        for (int i = 0; i < m; ++i) x[i] = wrap(x[i] + vf[i], f.sides[i]);
        break;
      case FactorKind::kSphere:
      case FactorKind::kHyperbolic: {
        const bool sph = f.kind == FactorKind::kSphere;
        const double nv2 = block_inner(f, vf, vf);
        if (!(nv2 > 0.0)) break;
        curved_step = true;
        const double nv = std::sqrt(nv2);
        const double a = nv / f.scale;
        const double c = sph ? std::cos(a) : std::cosh(a);
        const double s = sph ? std::sin(a) : std::sinh(a);
        double u[kMaxAmbient];
        for (int i = 0; i < m; ++i) u[i] = vf[i] / nv;
        // Transport the frame first: it needs the starting point.
        const double xs = sph ? -s / f.scale : s / f.scale;
        for (int k = 0; k < dim_; ++k) {
          double* w = frame.col(k).data() + f.offset;
          const double wu = block_inner(f, w, u);
          if (wu == 0.0) continue;
          for (int i = 0; i < m; ++i) w[i] += wu * ((c - 1.0) * u[i] + xs * x[i]);
        }
        for (int i = 0; i < m; ++i) x[i] = c * x[i] + f.scale * s * u[i];
        const double q = block_inner(f, x, x);
        const double fix = f.scale / std::sqrt(sph ? q : -q);
        for (int i = 0; i < m; ++i) x[i] *= fix;
        break;
      }
    }
  }
  if (!curved_step) return false;
  PointFrame pf{point, frame};
  if (frame_drift(pf) <= kDriftTolerance) return false;
  pf = reorthonormalize(pf);
  point = pf.point;
  frame = pf.frame;
  return true;
}

PointFrame ManifoldModel::exp_map(const PointFrame& pf, const VecN& xi) const {
  if (xi.size() != dim_) throw ModelError("tangent coefficient vector has wrong dimension");
  if (!xi.allFinite()) throw ModelError("non-finite tangent coefficients");
  PointFrame out = pf;
  step(out.point, out.frame, xi);
  return out;
}

VecA ManifoldModel::log_map(const VecA& from, const VecA& to) const {
  VecA v = VecA::Zero(ambient_);
  for (const auto& f : factors_) {
    const int m = f.ambient_dim();
    const double* x = from.data() + f.offset;
    const double* y = to.data() + f.offset;
    double* out = v.data() + f.offset;
    switch (f.kind) {
      case FactorKind::kEuclidean:
        for (int i = 0; i < m; ++i) out[i] = y[i] - x[i];
        break;
      case FactorKind::kTorus:
        for (int i = 0; i < m; ++i) {
          const double L = f.sides[i];
          double d = y[i] - x[i];
          d -= L * std::floor(d / L + 0.5);
          out[i] = d;
        }
        break;
      case FactorKind::kSphere:
      case FactorKind::kHyperbolic: {
        const bool sph = f.kind == FactorKind::kSphere;
        const double r2 = f.scale * f.scale;
        double u = (sph ? 1.0 : -1.0) * block_inner(f, x, y) / r2;
        u = sph ? std::clamp(u, -1.0, 1.0) : std::max(u, 1.0);
        const double theta = sph ? std::acos(u) : std::acosh(u);
        double w[kMaxAmbient];
        for (int i = 0; i < m; ++i) w[i] = y[i] - u * x[i];
        const double nw2 = block_inner(f, w, w);
        if (!(nw2 > 0.0) || theta == 0.0) break;
        const double k = f.scale * theta / std::sqrt(nw2);
        for (int i = 0; i < m; ++i) out[i] = k * w[i];
        break;
      }
    }
  }
  return v;
}

double ManifoldModel::distance(const VecA& a, const VecA& b) const {
  const VecA v = log_map(a, b);
  return std::sqrt(std::max(0.0, inner(v, v)));
}

/* ---------- curvature ---------- */

FrameCurvature ManifoldModel::frame_curvature(const VecA& /*point*/, const FrameMat& frame) const {
  FrameCurvature fc(dim_);
  for (const auto& f : factors_) {
    if (!curved(f)) continue;
    MatN g(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j)
        g(i, j) = g(j, i) = block_inner(f, frame.col(i).data() + f.offset, frame.col(j).data() + f.offset);
    fc.add_factor(f.curvature(), g);
  }
  return fc;
}

FrameCurvature ManifoldModel::frame_curvature(const PointFrame& pf) const {
  return frame_curvature(pf.point, pf.frame);
}

MatN ManifoldModel::curvature_R(const PointFrame& pf, const VecN& x, const VecN& y) const {
  return frame_curvature(pf)(x, y);
}

MatN ManifoldModel::ricci_transform(const PointFrame& pf) const {
  return frame_curvature(pf).ricci();
}

std::vector<MatN> ManifoldModel::nabla_ricci(const PointFrame& /*pf*/) const {
  // Every catalog member is a product of space forms, so Ric is parallel.
  return std::vector<MatN>(dim_, MatN::Zero(dim_, dim_));
}

VecN ManifoldModel::nabla_scalar(const PointFrame& /*pf*/) const { return VecN::Zero(dim_); }

MatN ManifoldModel::frame_hessian(const VecA& point, const FrameMat& frame, const VecA& grad,
                                  const MatA& hess) const {
  MatN h = frame.transpose() * hess * frame;
  for (const auto& f : factors_) {
    if (f.kind != FactorKind::kSphere && f.kind != FactorKind::kHyperbolic) continue;
    const int m = f.ambient_dim();
    double gx = 0.0;
    for (int i = 0; i < m; ++i) gx += grad[f.offset + i] * point[f.offset + i];
    const double c = (f.kind == FactorKind::kSphere ? -gx : gx) / (f.scale * f.scale);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        h(i, j) += c * block_inner(f, frame.col(i).data() + f.offset, frame.col(j).data() + f.offset);
  }
  return h;
}

}  // namespace pathlab::geometry
