#pragma once

#include <span>
#include <vector>

#include "pathlab/pathfunc/phi_profile.hpp"
#include "pathlab/sde/integrals.hpp"

namespace pathlab::malliavin {

using pathfunc::PhiProfile;
using sde::FramePath;
using sde::PathContext;

enum class Provenance { kDeterministic, kPathwise };

/* An adapted R^n-valued process on the grid: knot values v_0 = 0, ..., v_m
   and per-step rates r_k, with v_{k+1} = v_k + r_k dt.  Pathwise processes
   are built step by step from rates that may only look at the path up to
   the left knot, which is what keeps them adapted. */
class AdaptedProcess {
 public:
  AdaptedProcess(int dim, int steps, double dt, Provenance provenance = Provenance::kPathwise);

  static AdaptedProcess from_rates(std::vector<VecN> rates, double dt, Provenance provenance);
  static AdaptedProcess from_values(std::vector<VecN> values, double dt, Provenance provenance);

  int dim() const { return n_; }
  int steps() const { return static_cast<int>(rates_.size()); }
  double dt() const { return dt_; }
  Provenance provenance() const { return provenance_; }
  bool deterministic() const { return provenance_ == Provenance::kDeterministic; }

  const VecN& value(int i) const { return values_[i]; }
  const VecN& rate(int k) const { return rates_[k]; }
  std::span<const VecN> values() const { return values_; }
  std::span<const VecN> rates() const { return rates_; }

  // ||v||_H^2 = sum_k |r_k|^2 dt.
  double h_norm2() const;
  AdaptedProcess scaled(double c) const;

 private:
  int n_;
  double dt_;
  Provenance provenance_;
  std::vector<VecN> values_;
  std::vector<VecN> rates_;
};

double h_inner(const AdaptedProcess& a, const AdaptedProcess& b);
AdaptedProcess operator+(const AdaptedProcess& a, const AdaptedProcess& b);

// v_t = phi(t) e (deterministic).
AdaptedProcess deterministic_process(const PhiProfile& phi, const VecN& direction);

// Tangent vector U_{t_i} v_i at gamma_{t_i}, in ambient coordinates.
VecA realize(const AdaptedProcess& v, const FramePath& path, int i);

/* hat(v)_t = v_t + int_0^t Ric_s v_s ds.  Per step the rate is
   r_k + Ric_k (v_k + v_{k+1}) / 2: the trapezoid in v with the curvature
   frozen at the left knot, so the result stays adapted. */
AdaptedProcess hat(const AdaptedProcess& v, const PathContext& ctx);

// Solves (I + dt/2 Ric_k) v_{k+1} = (I - dt/2 Ric_k) v_k + dt w'_k, the exact
// inverse of hat on the grid.
AdaptedProcess hat_inverse(const AdaptedProcess& w, const PathContext& ctx);

// (1/2) sum_k <rate_k, dW_k> for a process that is already hatted.
double half_ito(const AdaptedProcess& hatted, const FramePath& path);

// delta(V) = (1/2) int <d/dt hat(v), dW>.
double divergence(const AdaptedProcess& v, const PathContext& ctx);

}  // namespace pathlab::malliavin
