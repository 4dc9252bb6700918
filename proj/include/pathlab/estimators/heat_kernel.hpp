#pragma once

#include <functional>
#include <stdexcept>

#include "pathlab/geometry/manifold.hpp"

namespace pathlab::estimators {

using geometry::ManifoldModel;

class UnsupportedOracle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/* Heat kernel of the generator Delta (so the Euclidean kernel is
   exp(-|x-y|^2/4t) / (4 pi t)^{n/2}).  Supported: Euclidean, flat torus
   (method of images), S^n(r) for n >= 2 (zonal eigenfunction series) and
   products of those.  Hyperbolic factors raise UnsupportedOracle. */
double heat_kernel(const ManifoldModel& model, const VecA& x, const VecA& y, double t);

// Value, ambient gradient and ambient Hessian in the second argument.
struct KernelJet {
  double value = 0.0;
  VecA grad;
  MatA hess;
};
KernelJet heat_kernel_jet(const ManifoldModel& model, const VecA& x, const VecA& y, double t);

bool has_heat_kernel(const ManifoldModel& model);

/* rho_t on S^n(r) as a function of u = <x,y>/r^2, with its first two
   u-derivatives.  Series truncated once the remaining terms are below
   1e-12; more than 500 modes (t below about 1e-4 r^2) is an error. */
struct ZonalValue {
  double z = 0.0;
  double dz = 0.0;
  double d2z = 0.0;
  int modes = 0;
};
ZonalValue sphere_zonal(int n, double radius, double t, double u);

// One-dimensional periodic kernel sum_j g_t(d + jL) and two d-derivatives.
struct ImageValue {
  double k = 0.0;
  double dk = 0.0;
  double d2k = 0.0;
};
ImageValue torus_image_kernel(double d, double side, double t);

/* f_t(x) = int rho_t(x,y) f(y) dy with gradient and Hessian in the identity
   frame at x, by tensor-grid quadrature (Euclidean: truncated trapezoid,
   torus: periodic trapezoid).  Models must be flat. */
struct FlowJet {
  double value = 0.0;
  VecN grad;
  MatN hess;
  double laplacian() const { return hess.trace(); }
};
FlowJet heat_flow_oracle(const ManifoldModel& model, const std::function<double(const VecA&)>& f,
                         const VecA& x, double t, int points_per_dim = 0);

// E[g(gamma_t)] for Brownian motion on S^2(r) started at x, by quadrature.
double sphere_heat_expectation(double radius, const VecA& x, double t,
                               const std::function<double(const VecA&)>& g);

}  // namespace pathlab::estimators
