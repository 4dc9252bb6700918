#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pathlab/geometry/manifold.hpp"

namespace pathlab::pathfunc {

using geometry::ManifoldModel;

/* k-point function f(y_1, ..., y_k) on ambient coordinates.  Derivatives are
   ambient partials; the Riemannian corrections are applied downstream.  The
   defaults are central finite differences (gradient step 1e-5 (1+|y|),
   Hessian step 1e-4 (1+|y|)); catalog members override them analytically. */
class BaseFunction {
 public:
  virtual ~BaseFunction() = default;

  virtual int slots() const = 0;
  virtual double value(std::span<const VecA> y) const = 0;
  virtual VecA gradient(std::span<const VecA> y, int slot) const;
  virtual MatA hessian(std::span<const VecA> y, int i, int j) const;
  virtual bool analytic() const { return false; }
  virtual std::string describe() const = 0;
};

using BasePtr = std::shared_ptr<const BaseFunction>;

// f = c (one slot).
BasePtr constant(double c);

/* f(y) = A exp(-|y - c|^2 / (2 sigma^2)).  Coordinates with a positive entry
   in `periods` are summed over images so the bump is periodic there (the
   torus needs this).  On spheres the ambient distance is the chord. */
BasePtr gaussian_bump(VecA center, double sigma, double amplitude = 1.0, std::vector<double> periods = {});

// f(y) = c + <a, y>.
BasePtr coordinate_linear(VecA a, double c = 0.0);

// f(y) = c + <b, y> + y^T Q y / 2 (Q symmetrised).
BasePtr coordinate_quadratic(MatA q, VecA b, double c = 0.0);

// f(y) = rho_{s0}(center, y) for the model's heat kernel.
BasePtr heat_kernel_at(const ManifoldModel& model, VecA center, double s0);

// f(y_1, y_2) = f1(y_1) f2(y_2) for two one-slot functions.
BasePtr product_of_two(BasePtr f1, BasePtr f2);

// Value-only function; every derivative comes from finite differences.
BasePtr numeric(int slots, std::function<double(std::span<const VecA>)> f, std::string name = "numeric");

// Periods vector for a model: side length on torus coordinates, 0 elsewhere.
std::vector<double> model_periods(const ManifoldModel& model);

struct CatalogEntry {
  std::string name;
  std::string parameters;
  std::string description;
};
std::vector<CatalogEntry> catalog();

}  // namespace pathlab::pathfunc
