#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pathlab/types.hpp"

namespace pathlab::geometry {

enum class FactorKind { kEuclidean, kTorus, kSphere, kHyperbolic };

/* One irreducible piece of a catalog manifold.  Sphere and hyperbolic factors
   live in R^{n+1}; the hyperbolic factor uses the hyperboloid sheet
   x_1^2 + ... + x_n^2 - x_{n+1}^2 = -s^2 with x_{n+1} > 0. */
struct Factor {
  FactorKind kind = FactorKind::kEuclidean;
  int dim = 1;
  double scale = 1.0;          // sphere radius r, or hyperbolic scale s
  std::vector<double> sides;   // torus side lengths
  int offset = 0;              // first ambient coordinate of this factor

  int ambient_dim() const;
  double curvature() const;    // sectional curvature kappa
};

struct PointFrame {
  VecA point;
  FrameMat frame;   // ambient x n, columns orthonormal for the factor metrics
};

/* Curvature at one frame, expressed in frame coordinates.  For every factor f
   we keep kappa_f and G_f = U^T P_f^T eta_f P_f U, so that

     R(x,y)w = sum_f kappa_f ( g_f(y,w) G_f x - g_f(x,w) G_f y ),

   the constant-curvature tensor with sphere sectional curvature +1/r^2. */
class FrameCurvature {
 public:
  FrameCurvature() = default;
  FrameCurvature(int n) : n_(n) {}

  void add_factor(double kappa, const MatN& projection);

  int dim() const { return n_; }
  int factor_count() const { return count_; }
  bool is_flat() const { return count_ == 0; }

  MatN operator()(const VecN& x, const VecN& y) const;
  VecN apply(const VecN& x, const VecN& y, const VecN& w) const;
  MatN ricci() const;

 private:
  int n_ = 0;
  int count_ = 0;
  std::array<double, kMaxFactors> kappa_{};
  std::array<MatN, kMaxFactors> proj_;
};

class ManifoldModel {
 public:
  static ManifoldModel euclidean(int n);
  static ManifoldModel flat_torus(std::vector<double> sides);
  static ManifoldModel sphere(int n, double radius);
  static ManifoldModel hyperbolic(int n, double scale);
  static ManifoldModel product(const std::vector<ManifoldModel>& parts);
  // "euclidean(2)", "torus(1,1)", "sphere(2,1)", "hyperbolic(2,1)",
  // products joined by '*': "sphere(2,1)*euclidean(1)".
  static ManifoldModel parse(std::string_view spec);

  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_; }
  std::span<const Factor> factors() const { return factors_; }
  std::string name() const;

  bool is_flat() const;
  bool is_ricci_flat() const { return is_flat(); }
  // Ric = lambda g with lambda returned through the pointer.
  bool is_einstein(double* lambda = nullptr) const;
  // Bound on the operator norm of Ric over the whole manifold.
  double ricci_bound() const;

  VecA default_base() const;
  bool contains(const VecA& point, double tol = 1e-9) const;
  PointFrame identity_frame(const VecA& point) const;

  double inner(const VecA& a, const VecA& b) const;   // metric on ambient tangent vectors
  MatN gram(const PointFrame& pf) const;
  double frame_drift(const PointFrame& pf) const;
  PointFrame reorthonormalize(const PointFrame& pf) const;

  PointFrame exp_map(const PointFrame& pf, const VecN& xi) const;
  // In-place step used by the path simulator.  Returns true when the frame
  // had to be re-orthonormalized.
  bool step(VecA& point, FrameMat& frame, const VecN& xi) const;
  VecA log_map(const VecA& from, const VecA& to) const;
  double distance(const VecA& a, const VecA& b) const;

  FrameCurvature frame_curvature(const PointFrame& pf) const;
  FrameCurvature frame_curvature(const VecA& point, const FrameMat& frame) const;
  MatN curvature_R(const PointFrame& pf, const VecN& x, const VecN& y) const;
  MatN ricci_transform(const PointFrame& pf) const;
  // Component k is (nabla_{e_k} Ric) as an n x n matrix.
  std::vector<MatN> nabla_ricci(const PointFrame& pf) const;
  VecN nabla_scalar(const PointFrame& pf) const;

  // Riemannian Hessian of an ambient-defined function in frame coordinates:
  // U^T D2f U plus the second fundamental form term sum_f c_f G_f.
  MatN frame_hessian(const VecA& point, const FrameMat& frame, const VecA& ambient_gradient,
                     const MatA& ambient_hessian) const;

 private:
  void finish();

  std::vector<Factor> factors_;
  int dim_ = 0;
  int ambient_ = 0;
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pathlab::geometry
