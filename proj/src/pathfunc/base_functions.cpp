#include "pathlab/pathfunc/base_functions.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pathlab/estimators/heat_kernel.hpp"

namespace pathlab::pathfunc {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string vec_str(const VecA& v) {
  std::string s = "(";
  for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s + ")";
}

void require_slot(std::span<const VecA> y, int slots) {
  if (static_cast<int>(y.size()) != slots) throw std::invalid_argument("wrong number of evaluation points");
}

class Constant final : public BaseFunction {
 public:
  explicit Constant(double c) : c_(c) {}
  int slots() const override { return 1; }
  double value(std::span<const VecA>) const override { return c_; }
  VecA gradient(std::span<const VecA> y, int) const override { return VecA::Zero(y[0].size()); }
  MatA hessian(std::span<const VecA> y, int, int) const override {
    return MatA::Zero(y[0].size(), y[0].size());
  }
  bool analytic() const override { return true; }
  std::string describe() const override { return "constant(" + num(c_) + ")"; }

 private:
  double c_;
};

class GaussianBump final : public BaseFunction {
 public:
  GaussianBump(VecA c, double sigma, double amp, std::vector<double> periods)
      : c_(std::move(c)), sigma_(sigma), amp_(amp), periods_(std::move(periods)) {
    if (!(sigma > 0.0)) throw std::invalid_argument("bump width must be positive");
    periods_.resize(c_.size(), 0.0);
  }
  int slots() const override { return 1; }

  struct Coord {
    double q, dq, d2q;
  };
  Coord coord(int i, double y) const {
    const double s2 = sigma_ * sigma_;
    Coord out{0.0, 0.0, 0.0};
    auto add = [&](double d) {
      const double e = std::exp(-d * d / (2.0 * s2));
      out.q += e;
      out.dq += -d / s2 * e;
      out.d2q += (d * d / (s2 * s2) - 1.0 / s2) * e;
      return e * (1.0 + d * d / s2);
    };
    const double L = periods_[i];
    double d = y - c_[i];
    if (L <= 0.0) {
      add(d);
      return out;
    }
    d -= L * std::floor(d / L + 0.5);
    add(d);
    for (int j = 1; j < 100000; ++j)
      if (std::max(add(d + j * L), add(d - j * L)) < 1e-18) break;
    return out;
  }

  double value(std::span<const VecA> y) const override {
    require_slot(y, 1);
    double v = amp_;
    for (int i = 0; i < c_.size(); ++i) v *= coord(i, y[0][i]).q;
    return v;
  }
  VecA gradient(std::span<const VecA> y, int) const override {
    require_slot(y, 1);
    const int m = c_.size();
    std::vector<Coord> cs;
    for (int i = 0; i < m; ++i) cs.push_back(coord(i, y[0][i]));
    VecA g(m);
    for (int i = 0; i < m; ++i) {
      double p = amp_ * cs[i].dq;
      for (int j = 0; j < m; ++j)
        if (j != i) p *= cs[j].q;
      g[i] = p;
    }
    return g;
  }
  MatA hessian(std::span<const VecA> y, int, int) const override {
    require_slot(y, 1);
    const int m = c_.size();
    std::vector<Coord> cs;
    for (int i = 0; i < m; ++i) cs.push_back(coord(i, y[0][i]));
    MatA h(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double p = amp_;
        for (int j = 0; j < m; ++j) {
          if (a == b && j == a) p *= cs[j].d2q;
          else if (j == a || j == b) p *= cs[j].dq;
          else p *= cs[j].q;
        }
        h(a, b) = p;
      }
    return h;
  }
  bool analytic() const override { return true; }
  std::string describe() const override {
    return "gaussian-bump(center=" + vec_str(c_) + ",sigma=" + num(sigma_) + ",amplitude=" + num(amp_) + ")";
  }

 private:
  VecA c_;
  double sigma_;
  double amp_;
  std::vector<double> periods_;
};

class CoordinateLinear final : public BaseFunction {
 public:
  CoordinateLinear(VecA a, double c) : a_(std::move(a)), c_(c) {}
  int slots() const override { return 1; }
  double value(std::span<const VecA> y) const override {
    require_slot(y, 1);
    return c_ + a_.dot(y[0]);
  }
  VecA gradient(std::span<const VecA>, int) const override { return a_; }
  MatA hessian(std::span<const VecA>, int, int) const override { return MatA::Zero(a_.size(), a_.size()); }
  bool analytic() const override { return true; }
  std::string describe() const override { return "coordinate-linear(a=" + vec_str(a_) + ",c=" + num(c_) + ")"; }

 private:
  VecA a_;
  double c_;
};

class CoordinateQuadratic final : public BaseFunction {
 public:
  CoordinateQuadratic(MatA q, VecA b, double c) : q_(0.5 * (q + q.transpose())), b_(std::move(b)), c_(c) {}
  int slots() const override { return 1; }
  double value(std::span<const VecA> y) const override {
    require_slot(y, 1);
    return c_ + b_.dot(y[0]) + 0.5 * y[0].dot(q_ * y[0]);
  }
  VecA gradient(std::span<const VecA> y, int) const override { return b_ + q_ * y[0]; }
  MatA hessian(std::span<const VecA>, int, int) const override { return q_; }
  bool analytic() const override { return true; }
  std::string describe() const override { return "coordinate-quadratic(b=" + vec_str(b_) + ",c=" + num(c_) + ")"; }

 private:
  MatA q_;
  VecA b_;
  double c_;
};

class HeatKernelAt final : public BaseFunction {
 public:
  HeatKernelAt(const ManifoldModel& model, VecA center, double s0) : model_(model), c_(std::move(center)), s0_(s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("heat-kernel time must be positive");
    if (!estimators::has_heat_kernel(model)) throw estimators::UnsupportedOracle("no heat kernel for " + model.name());
  }
  int slots() const override { return 1; }
  double value(std::span<const VecA> y) const override {
    require_slot(y, 1);
    return estimators::heat_kernel(model_, c_, y[0], s0_);
  }
  VecA gradient(std::span<const VecA> y, int) const override {
    return estimators::heat_kernel_jet(model_, c_, y[0], s0_).grad;
  }
  MatA hessian(std::span<const VecA> y, int, int) const override {
    return estimators::heat_kernel_jet(model_, c_, y[0], s0_).hess;
  }
  bool analytic() const override { return true; }
  std::string describe() const override {
    return "heat-kernel(s0=" + num(s0_) + ",center=" + vec_str(c_) + ")";
  }

 private:
  ManifoldModel model_;
  VecA c_;
  double s0_;
};

class ProductOfTwo final : public BaseFunction {
 public:
  ProductOfTwo(BasePtr f1, BasePtr f2) : f1_(std::move(f1)), f2_(std::move(f2)) {
    if (!f1_ || !f2_ || f1_->slots() != 1 || f2_->slots() != 1)
      throw std::invalid_argument("product-of-two needs two one-point functions");
  }
  int slots() const override { return 2; }
  double value(std::span<const VecA> y) const override {
    require_slot(y, 2);
    return f1_->value(y.subspan(0, 1)) * f2_->value(y.subspan(1, 1));
  }
  VecA gradient(std::span<const VecA> y, int slot) const override {
    require_slot(y, 2);
    if (slot == 0) return f1_->gradient(y.subspan(0, 1), 0) * f2_->value(y.subspan(1, 1));
    return f1_->value(y.subspan(0, 1)) * f2_->gradient(y.subspan(1, 1), 0);
  }
  MatA hessian(std::span<const VecA> y, int i, int j) const override {
    require_slot(y, 2);
    if (i == 0 && j == 0) return f1_->hessian(y.subspan(0, 1), 0, 0) * f2_->value(y.subspan(1, 1));
    if (i == 1 && j == 1) return f1_->value(y.subspan(0, 1)) * f2_->hessian(y.subspan(1, 1), 0, 0);
    const VecA g1 = f1_->gradient(y.subspan(0, 1), 0);
    const VecA g2 = f2_->gradient(y.subspan(1, 1), 0);
    return i == 0 ? MatA(g1 * g2.transpose()) : MatA(g2 * g1.transpose());
  }
  bool analytic() const override { return f1_->analytic() && f2_->analytic(); }
  std::string describe() const override { return "product-of-two(" + f1_->describe() + "," + f2_->describe() + ")"; }

 private:
  BasePtr f1_;
  BasePtr f2_;
};

class Numeric final : public BaseFunction {
 public:
  Numeric(int slots, std::function<double(std::span<const VecA>)> f, std::string name)
      : slots_(slots), f_(std::move(f)), name_(std::move(name)) {}
  int slots() const override { return slots_; }
  double value(std::span<const VecA> y) const override { return f_(y); }
  std::string describe() const override { return name_; }

 private:
  int slots_;
  std::function<double(std::span<const VecA>)> f_;
  std::string name_;
};

}  // namespace

VecA BaseFunction::gradient(std::span<const VecA> y, int slot) const {
  std::vector<VecA> p(y.begin(), y.end());
  const int m = p[slot].size();
  VecA g(m);
  for (int i = 0; i < m; ++i) {
    const double x0 = p[slot][i];
    const double h = 1e-5 * (1.0 + std::abs(x0));
    p[slot][i] = x0 + h;
    const double up = value(p);
    p[slot][i] = x0 - h;
    const double dn = value(p);
    p[slot][i] = x0;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

MatA BaseFunction::hessian(std::span<const VecA> y, int si, int sj) const {
  std::vector<VecA> p(y.begin(), y.end());
  const int mi = p[si].size();
  const int mj = p[sj].size();
  MatA hm(mi, mj);
  for (int a = 0; a < mi; ++a)
    for (int b = 0; b < mj; ++b) {
      const double xa = p[si][a];
      const double xb = p[sj][b];
      const double ha = 1e-4 * (1.0 + std::abs(xa));
      const double hb = 1e-4 * (1.0 + std::abs(xb));
      auto at = [&](double da, double db) {
        p[si][a] = xa + da;
        p[sj][b] += db;  // same coordinate when (si,a) == (sj,b)
        const double v = value(p);
        p[si][a] = xa;
        p[sj][b] = xb;
        return v;
      };
      if (si == sj && a == b) {
        hm(a, b) = (at(ha, 0.0) - 2.0 * value(p) + at(-ha, 0.0)) / (ha * ha);
      } else {
        hm(a, b) = (at(ha, hb) - at(ha, -hb) - at(-ha, hb) + at(-ha, -hb)) / (4.0 * ha * hb);
      }
    }
  return hm;
}

BasePtr constant(double c) { return std::make_shared<Constant>(c); }

BasePtr gaussian_bump(VecA center, double sigma, double amplitude, std::vector<double> periods) {
  return std::make_shared<GaussianBump>(std::move(center), sigma, amplitude, std::move(periods));
}

BasePtr coordinate_linear(VecA a, double c) { return std::make_shared<CoordinateLinear>(std::move(a), c); }

BasePtr coordinate_quadratic(MatA q, VecA b, double c) {
  if (q.rows() != q.cols() || q.rows() != b.size()) throw std::invalid_argument("quadratic shapes disagree");
  return std::make_shared<CoordinateQuadratic>(std::move(q), std::move(b), c);
}

BasePtr heat_kernel_at(const ManifoldModel& model, VecA center, double s0) {
  return std::make_shared<HeatKernelAt>(model, std::move(center), s0);
}

BasePtr product_of_two(BasePtr f1, BasePtr f2) { return std::make_shared<ProductOfTwo>(std::move(f1), std::move(f2)); }

BasePtr numeric(int slots, std::function<double(std::span<const VecA>)> f, std::string name) {
  return std::make_shared<Numeric>(slots, std::move(f), std::move(name));
}

std::vector<double> model_periods(const ManifoldModel& model) {
  std::vector<double> p(model.ambient_dim(), 0.0);
  for (const auto& f : model.factors())
    if (f.kind == geometry::FactorKind::kTorus)
      for (int i = 0; i < f.dim; ++i) p[f.offset + i] = f.sides[i];
  return p;
}

std::vector<CatalogEntry> catalog() {
  return {
      {"constant", "value", "f = value"},
      {"gaussian-bump", "center, sigma, amplitude",
       "amplitude * exp(-|y - center|^2 / (2 sigma^2)), periodised over torus coordinates"},
      {"coordinate-linear", "coefficients, offset", "offset + <coefficients, y>"},
      {"coordinate-quadratic", "matrix (row-major), coefficients, offset", "offset + <coefficients, y> + y^T Q y / 2"},
      {"heat-kernel", "s0, center", "rho_{s0}(center, y) of the model (Euclidean, torus, S^n)"},
      {"product-of-two", "center, sigma, center2, sigma2, amplitude",
       "two-time product of Gaussian bumps f1(y_1) f2(y_2)"},
  };
}

}  // namespace pathlab::pathfunc
