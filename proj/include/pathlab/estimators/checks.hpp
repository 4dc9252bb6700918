#pragma once

#include <string>
#include <vector>

#include "pathlab/estimators/heat_kernel.hpp"
#include "pathlab/estimators/monte_carlo.hpp"
#include "pathlab/malliavin/process.hpp"

namespace pathlab::estimators {

using malliavin::AdaptedProcess;
using pathfunc::BasePtr;
using pathfunc::CylinderFunction;
using pathfunc::PhiProfile;

/* kInfo marks reported quantities that carry no claim.  kUnasserted marks an
   inequality assembled on a model where it is only known up to constants the
   theory leaves unspecified. */
enum class Verdict { kInfo, kHolds, kHoldsWithinCI, kViolated, kUnasserted };

std::string to_string(Verdict v);
bool acceptable(Verdict v);

// LHS >= 0: holds; LHS >= -k se: holds-within-CI; else violated.
Verdict lower_bound_verdict(const Estimate& e, double k);
// Estimate <= 0 (mirror of the above).
Verdict upper_bound_verdict(const Estimate& e, double k);
// A difference that should vanish: |d| <= max(k se, tol).
Verdict zero_verdict(const Estimate& d, double k, double tol = 1e-12);

struct Entry {
  std::string label;
  std::string component = "value";
  Estimate est;
  Verdict verdict = Verdict::kInfo;
};

struct CheckResult {
  std::string experiment;
  std::vector<Entry> entries;
  std::size_t paths = 0;
  std::size_t excluded = 0;
  double wall_seconds = 0.0;

  const Entry& get(const std::string& label, const std::string& component = "value") const;
  bool passed() const;
  void add(std::string label, Estimate e, Verdict v = Verdict::kInfo, std::string component = "value");
};

// Component label for vector entry a (0-based): "v_1", ...; matrix: "h_12".
std::string vector_component(int a);
std::string matrix_component(int a, int b);

// Mean and covariance of W_T against 0 and 2T I.
CheckResult check_noise(const MCSetup& setup, double k = 3.0);

// E[f(gamma_t)] against the heat-flow oracle: |diff| < max(k se, rel * |oracle|).
CheckResult check_heat_flow(const MCSetup& setup, const BasePtr& f, double t, double k = 3.0, double rel = 0.01);

// E[D_V F G] = E[-F D_V G + F G delta(V)], V = phi e.
CheckResult check_ibp(const MCSetup& setup, const CylinderFunction& F, const CylinderFunction& G,
                      const PhiProfile& phi, const VecN& direction, double k = 3.0);

// Q_F[V,V] in the four-term form and the variance form, V = phi e.
CheckResult halfway_harnack(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi,
                            const VecN& direction, double k = 3.0);

// E[F delta(W) delta(V)] - E[D_V F delta(W)] = E[F delta(mod nabla_V W)] + E[F <V,W>_hat] / 2.
CheckResult check_commutator(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi_v,
                             const VecN& dir_v, const PhiProfile& phi_w, const VecN& dir_w, double k = 3.0);

struct HarnackReport {
  int dim = 0;
  Estimate laplacian;            // E[Lap_phi F]
  std::vector<Estimate> gradient;  // E[grad_phi F]
  Estimate mean_f;               // E[F]
  Estimate mean_f2;              // E[F^2]
  double phi_norm2 = 0.0;
  Estimate combined;
  Estimate moment_ratio;         // E[F^2]^{1/2} / E[F]
  Verdict verdict = Verdict::kInfo;
  std::size_t paths = 0;
  std::size_t excluded = 0;

  // E[Lap]/E[F] - |E[grad]|^2/E[F]^2 + (n/2)||phi||^2 from the stored terms.
  double recompute() const;
};

HarnackReport differential_harnack(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi,
                                   double k = 3.0);
CheckResult to_result(const HarnackReport& r);

struct MatrixHarnackReport {
  int dim = 0;
  std::vector<Estimate> matrix;  // row-major n x n
  Estimate min_eigenvalue;
  Estimate mean_f;
  Estimate moment_ratio;
  double phi_norm2 = 0.0;
  Verdict verdict = Verdict::kInfo;
  std::size_t paths = 0;
  std::size_t excluded = 0;
};

// E[Hess_phi F]/E[F] - E[grad]E[grad]^T/E[F]^2 + (1/2)||phi||^2 I.
MatrixHarnackReport matrix_harnack(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi,
                                   double k = 3.0);
CheckResult to_result(const MatrixHarnackReport& r);

// F = f(gamma_{t0}), phi = ramp(t0), against the heat flow f_{t0}(x).
CheckResult liyau_recovery(const MCSetup& setup, const BasePtr& f, double t0, double k = 3.0,
                           double value_rel = 0.01, double lhs_rel = 0.02);

// E[F(gamma + h)] = E[F(gamma) exp(<h,gamma>/2 - ||h||^2/4)] (Euclidean).
CheckResult check_cameron_martin(const MCSetup& setup, const CylinderFunction& F, const AdaptedProcess& h,
                                 double k = 3.0);

// Midpoint defect of Phi(h) = ln E[F(gamma + h)] + ||h||^2/4 (Euclidean).
CheckResult check_convexity(const MCSetup& setup, const CylinderFunction& F, const AdaptedProcess& h1,
                            const AdaptedProcess& h2, double k = 3.0);

// (Phi(h + eps u) - 2 Phi(h) + Phi(h - eps u)) / eps^2 with common paths.
Estimate convexity_second_difference(const MCSetup& setup, const CylinderFunction& F, const AdaptedProcess& h,
                                     const AdaptedProcess& u, double eps = 1e-2);

// Means of the pathwise error norms for V_a = phi e_a.
CheckResult error_norm_experiment(const MCSetup& setup, const PhiProfile& phi);

}  // namespace pathlab::estimators
