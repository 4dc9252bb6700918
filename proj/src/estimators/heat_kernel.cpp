#include "pathlab/estimators/heat_kernel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace pathlab::estimators {

using geometry::Factor;
using geometry::FactorKind;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxModes = 500;

double sphere_volume(int n, double r) {
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) * std::pow(r, n);
}

// C_l^beta(1) = Gamma(l + 2 beta) / (Gamma(2 beta) l!)
double gegenbauer_at_one(int l, double beta) {
  if (l < 0) return 0.0;
  return std::exp(std::lgamma(l + 2.0 * beta) - std::lgamma(2.0 * beta) - std::lgamma(l + 1.0));
}

struct Recurrence {
  double beta;
  double prev = 0.0;  // C_{l-2}
  double cur = 0.0;   // C_{l-1}
  int l = -1;
  // Advance to C_{l+1}^beta(u) and return it.
  double next(double u) {
    ++l;
    double c;
    if (l == 0) c = 1.0;
    else if (l == 1) c = 2.0 * beta * u;
    else c = (2.0 * u * (l + beta - 1.0) * cur - (l + 2.0 * beta - 2.0) * prev) / l;
    prev = cur;
    cur = c;
    return c;
  }
};

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("heat kernel time must be positive");
}

// Jet of one factor's kernel in that factor's ambient block.
struct BlockJet {
  double value;
  VecA grad;
  MatA hess;
};

BlockJet factor_jet(const Factor& f, const double* x, const double* y, double t) {
  const int m = f.ambient_dim();
  BlockJet out{0.0, VecA::Zero(m), MatA::Zero(m, m)};
  switch (f.kind) {
    case FactorKind::kEuclidean: {
      double d2 = 0.0;
      for (int i = 0; i < m; ++i) d2 += (y[i] - x[i]) * (y[i] - x[i]);
      const double v = std::exp(-d2 / (4.0 * t)) / std::pow(4.0 * kPi * t, 0.5 * m);
      out.value = v;
      for (int i = 0; i < m; ++i) out.grad[i] = -(y[i] - x[i]) / (2.0 * t) * v;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          out.hess(i, j) = ((y[i] - x[i]) * (y[j] - x[j]) / (4.0 * t * t) - (i == j ? 0.5 / t : 0.0)) * v;
      break;
    }
    case FactorKind::kTorus: {
      std::array<ImageValue, kMaxAmbient> k;
      for (int i = 0; i < m; ++i) k[i] = torus_image_kernel(y[i] - x[i], f.sides[i], t);
      auto prod_except = [&](int a, int b) {
        double p = 1.0;
        for (int i = 0; i < m; ++i)
          if (i != a && i != b) p *= k[i].k;
        return p;
      };
      out.value = prod_except(-1, -1);
      for (int i = 0; i < m; ++i) out.grad[i] = k[i].dk * prod_except(i, -1);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          out.hess(i, j) = i == j ? k[i].d2k * prod_except(i, -1) : k[i].dk * k[j].dk * prod_except(i, j);
      break;
    }
    case FactorKind::kSphere: {
      if (f.dim < 2) throw UnsupportedOracle("no heat kernel oracle for the circle factor");
      const double r2 = f.scale * f.scale;
      double u = 0.0;
      for (int i = 0; i < m; ++i) u += x[i] * y[i];
      u = std::clamp(u / r2, -1.0, 1.0);
      const ZonalValue z = sphere_zonal(f.dim, f.scale, t, u);
      out.value = z.z;
      for (int i = 0; i < m; ++i) out.grad[i] = z.dz * x[i] / r2;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.hess(i, j) = z.d2z * x[i] * x[j] / (r2 * r2);
      break;
    }
    case FactorKind::kHyperbolic:
      throw UnsupportedOracle("no heat kernel oracle for hyperbolic space");
  }
  return out;
}

}  // namespace

bool has_heat_kernel(const ManifoldModel& model) {
  for (const auto& f : model.factors()) {
    if (f.kind == FactorKind::kHyperbolic) return false;
    if (f.kind == FactorKind::kSphere && f.dim < 2) return false;
  }
  return true;
}

ZonalValue sphere_zonal(int n, double radius, double t, double u) {
  check_time(t);
  if (n < 2) throw UnsupportedOracle("zonal series needs n >= 2");
  const double alpha = 0.5 * (n - 1);
  const double vol = sphere_volume(n, radius);
  const double r2 = radius * radius;
  Recurrence c0{alpha}, c1{alpha + 1.0}, c2{alpha + 2.0};
  ZonalValue out;
  double last_bound = INFINITY;
  for (int l = 0; l <= kMaxModes; ++l) {
    const double lambda = l * (l + n - 1.0) / r2;
    const double coeff = std::exp(-lambda * t) / vol * (l + alpha) / alpha;
    const double p0 = c0.next(u);
    const double p1 = l >= 1 ? c1.next(u) : 0.0;
    const double p2 = l >= 2 ? c2.next(u) : 0.0;
    out.z += coeff * p0;
    out.dz += coeff * 2.0 * alpha * p1;
    out.d2z += coeff * 4.0 * alpha * (alpha + 1.0) * p2;
    out.modes = l + 1;
    const double bound = coeff * (gegenbauer_at_one(l, alpha) + 2.0 * alpha * gegenbauer_at_one(l - 1, alpha + 1.0) +
                                  4.0 * alpha * (alpha + 1.0) * gegenbauer_at_one(l - 2, alpha + 2.0));
    // Past the peak the bounds fall faster than geometrically, so a small
    // term that also halves the previous one caps the tail near 2 * bound.
    if (l > 2 && bound < 5e-13 && bound < 0.5 * last_bound) return out;
    last_bound = bound;
  }
  throw UnsupportedOracle("sphere heat kernel series did not converge within 500 modes (t too small)");
}

ImageValue torus_image_kernel(double d, double side, double t) {
  check_time(t);
  d -= side * std::floor(d / side + 0.5);
  const double norm = 1.0 / std::sqrt(4.0 * kPi * t);
  ImageValue out;
  auto add = [&](double x) {
    const double g = norm * std::exp(-x * x / (4.0 * t));
    out.k += g;
    out.dk += -x / (2.0 * t) * g;
    out.d2k += (x * x / (4.0 * t * t) - 0.5 / t) * g;
    return g * (1.0 + std::abs(x) / (2.0 * t) + x * x / (4.0 * t * t) + 0.5 / t);
  };
  add(d);
  for (int j = 1; j < 1000000; ++j) {
    const double a = add(d + j * side);
    const double b = add(d - j * side);
    if (std::max(a, b) < 1e-17) return out;
  }
  throw UnsupportedOracle("torus image sum did not converge");
}

KernelJet heat_kernel_jet(const ManifoldModel& model, const VecA& x, const VecA& y, double t) {
  check_time(t);
  const int amb = model.ambient_dim();
  std::vector<BlockJet> blocks;
  for (const auto& f : model.factors())
    blocks.push_back(factor_jet(f, x.data() + f.offset, y.data() + f.offset, t));
  const auto factors = model.factors();
  const int nf = static_cast<int>(factors.size());
  auto prod_except = [&](int a, int b) {
    double p = 1.0;
    for (int i = 0; i < nf; ++i)
      if (i != a && i != b) p *= blocks[i].value;
    return p;
  };
  KernelJet out{prod_except(-1, -1), VecA::Zero(amb), MatA::Zero(amb, amb)};
  for (int a = 0; a < nf; ++a) {
    const int oa = factors[a].offset;
    const int ma = factors[a].ambient_dim();
    out.grad.segment(oa, ma) = blocks[a].grad * prod_except(a, -1);
    for (int b = 0; b < nf; ++b) {
      const int ob = factors[b].offset;
      const int mb = factors[b].ambient_dim();
      if (a == b)
        out.hess.block(oa, oa, ma, ma) = blocks[a].hess * prod_except(a, -1);
      else
        out.hess.block(oa, ob, ma, mb) = blocks[a].grad * blocks[b].grad.transpose() * prod_except(a, b);
    }
  }
  return out;
}

double heat_kernel(const ManifoldModel& model, const VecA& x, const VecA& y, double t) {
  check_time(t);
  double v = 1.0;
  for (const auto& f : model.factors()) v *= factor_jet(f, x.data() + f.offset, y.data() + f.offset, t).value;
  return v;
}

FlowJet heat_flow_oracle(const ManifoldModel& model, const std::function<double(const VecA&)>& f, const VecA& x,
                         double t, int points) {
  check_time(t);
  if (!model.is_flat()) throw UnsupportedOracle("quadrature heat-flow oracle needs a flat model");
  for (const auto& fac : model.factors())
    if (fac.kind != FactorKind::kEuclidean && fac.kind != FactorKind::kTorus)
      throw UnsupportedOracle("quadrature heat-flow oracle needs a flat model");
  const int n = model.dim();
  if (n > 3) throw UnsupportedOracle("quadrature heat-flow oracle supports n <= 3");
  if (points <= 0) points = n == 1 ? 4000 : n == 2 ? 256 : 64;

  // Per-coordinate nodes, weights and periodicity.
  std::vector<std::vector<double>> nodes(n);
  std::vector<double> weight(n);
  std::vector<double> period(n, 0.0);
  for (const auto& fac : model.factors()) {
    for (int i = 0; i < fac.dim; ++i) {
      const int c = fac.offset + i;
      if (fac.kind == FactorKind::kTorus) {
        const double L = fac.sides[i];
        period[c] = L;
        weight[c] = L / points;
        for (int k = 0; k < points; ++k) nodes[c].push_back(k * L / points);
      } else {
        const double R = 12.0 * std::sqrt(t);
        const double h = 2.0 * R / (points - 1);
        weight[c] = h;
        for (int k = 0; k < points; ++k) nodes[c].push_back(x[c] - R + k * h);
      }
    }
  }

  FlowJet out{0.0, VecN::Zero(n), MatN::Zero(n, n)};
  std::vector<int> idx(n, 0);
  VecA y(n);
  const double norm = std::pow(4.0 * kPi * t, -0.5);
  while (true) {
    double w = 1.0;
    std::array<double, 3> k{}, dk{}, d2k{};
    for (int c = 0; c < n; ++c) {
      y[c] = nodes[c][idx[c]];
      w *= weight[c];
      // Kernel derivatives in x: d/dx g(y - x) = -g'(y - x).
      if (period[c] > 0.0) {
        const ImageValue iv = torus_image_kernel(y[c] - x[c], period[c], t);
        k[c] = iv.k;
        dk[c] = -iv.dk;
        d2k[c] = iv.d2k;
      } else {
        const double d = y[c] - x[c];
        const double g = norm * std::exp(-d * d / (4.0 * t));
        k[c] = g;
        dk[c] = d / (2.0 * t) * g;
        d2k[c] = (d * d / (4.0 * t * t) - 0.5 / t) * g;
      }
    }
    const double fy = f(y) * w;
    auto prod_except = [&](int a, int b) {
      double p = 1.0;
      for (int c = 0; c < n; ++c)
        if (c != a && c != b) p *= k[c];
      return p;
    };
    out.value += fy * prod_except(-1, -1);
    for (int a = 0; a < n; ++a) {
      out.grad[a] += fy * dk[a] * prod_except(a, -1);
      for (int b = 0; b < n; ++b)
        out.hess(a, b) += fy * (a == b ? d2k[a] * prod_except(a, -1) : dk[a] * dk[b] * prod_except(a, b));
    }
    int c = 0;
    while (c < n && ++idx[c] == points) idx[c++] = 0;
    if (c == n) break;
  }
  return out;
}

double sphere_heat_expectation(double radius, const VecA& x, double t,
                               const std::function<double(const VecA&)>& g) {
  check_time(t);
  if (x.size() != 3) throw UnsupportedOracle("sphere expectation oracle supports S^2 only");
  const VecA ex = x / x.norm();
  // Orthonormal complement of ex.
  VecA a = VecA::Zero(3);
  a[std::abs(ex[0]) < 0.9 ? 0 : 1] = 1.0;
  a -= a.dot(ex) * ex;
  a /= a.norm();
  VecA b(3);
  b << ex[1] * a[2] - ex[2] * a[1], ex[2] * a[0] - ex[0] * a[2], ex[0] * a[1] - ex[1] * a[0];

  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const int panels = 96;
  const int azimuth = 192;
  const double r2 = radius * radius;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = kPi * p / panels;
    const double hi = kPi * (p + 1) / panels;
    auto ring = [&](double theta) {
      const double kernel = sphere_zonal(2, radius, t, std::cos(theta)).z;
      if (kernel == 0.0) return 0.0;
      double s = 0.0;
      for (int q = 0; q < azimuth; ++q) {
        const double psi = 2.0 * kPi * q / azimuth;
        VecA y = radius * (std::cos(theta) * ex + std::sin(theta) * (std::cos(psi) * a + std::sin(psi) * b));
        s += g(y);
      }
      return kernel * s * (2.0 * kPi / azimuth) * r2 * std::sin(theta);
    };
    total += Gauss::integrate(ring, lo, hi);
  }
  return total;
}

}  // namespace pathlab::estimators
