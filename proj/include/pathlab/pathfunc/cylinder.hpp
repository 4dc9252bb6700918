#pragma once

#include <span>
#include <vector>

#include "pathlab/pathfunc/base_functions.hpp"
#include "pathlab/pathfunc/phi_profile.hpp"
#include "pathlab/sde/integrals.hpp"

namespace pathlab::pathfunc {

using sde::FramePath;
using sde::PathContext;

// F(gamma) = f(gamma_{t_1}, ..., gamma_{t_k}).
class CylinderFunction {
 public:
  CylinderFunction(std::vector<double> times, BasePtr base);

  int k() const { return static_cast<int>(times_.size()); }
  std::span<const double> times() const { return times_; }
  const BaseFunction& base() const { return *base_; }
  const BasePtr& base_ptr() const { return base_; }
  // Knot indices of the evaluation times; throws sde::OffGridTime.
  std::vector<int> knots(const sde::TimeGrid& grid) const;

 private:
  std::vector<double> times_;
  BasePtr base_;
};

enum class JetOrder { kValue, kGradient, kHessian };

/* Everything a path contributes to F's derivatives.  grad[j] is
   P_{t_j} grad^{(j)} f in base-frame coordinates, i.e. U_{t_j}^T d_j f;
   hess[i*k + j] is the block <grad^{(i)} grad^{(j)} f, U_{t_i} . (x) U_{t_j} .>
   with the Riemannian correction on the diagonal blocks. */
struct CylinderJet {
  std::vector<int> knots;
  double value = 0.0;
  std::vector<VecN> grad;
  std::vector<MatN> hess;

  int k() const { return static_cast<int>(knots.size()); }
  const MatN& block(int i, int j) const { return hess[i * k() + j]; }
};

CylinderJet make_jet(const CylinderFunction& F, const FramePath& path, JetOrder order = JetOrder::kHessian);
// Jet at shifted points gamma_{t_j} + h_j (flat models only; used by the
// Cameron-Martin and convexity estimators).
CylinderJet make_shifted_jet(const CylinderFunction& F, const FramePath& path, std::span<const VecN> shifts,
                             JetOrder order = JetOrder::kValue);

double evaluate(const CylinderFunction& F, const FramePath& path);

// sum_{t_j > t_i} P_{t_j} grad^{(j)} f.
VecN parallel_gradient(const CylinderJet& jet, int knot);
VecN parallel_gradient(const CylinderFunction& F, const FramePath& path, int knot);

// sum_j phi(t_j) P_{t_j} grad^{(j)} f.
VecN phi_gradient(const CylinderJet& jet, const PhiProfile& phi);
VecN phi_gradient(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi);

// D_{Uh}F = sum_j <P_{t_j} grad^{(j)} f, h_{t_j}> for knot values h.
double directional_derivative(const CylinderJet& jet, std::span<const VecN> h);

double l2_phi_hessian(const CylinderJet& jet, const PhiProfile& phi, const VecN& v, const VecN& w);
double l2_phi_hessian(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi, const VecN& v,
                      const VecN& w);

/* Curvature sums over the cylinder times for the basis directions e_a, with
   A^a the running curvature matrix of k = phi e_a:

     direct[a][i]  = A^a_{K_i} phi_{K_i}                      (D_V D_W part)
     connect[a][i] = sum_{j<K_i} A^a_j (phi_{j+1} - phi_j)     (D_{nabla_V W} part)
     strat[a][i]   = sum_{j<K_i} B^a_j phi_{j+1}                (Stratonovich sum)

   so that direct - connect == strat up to rounding (summation by parts).
   The Markovian correction C(v,w) = sum_i <g_i, sum_a v_a (direct-connect) w>. */
class CurvatureSums {
 public:
  CurvatureSums(const PathContext& ctx, const PhiProfile& phi, std::span<const int> knots,
                bool with_stratonovich = false);

  int dim() const { return n_; }
  bool zero() const { return zero_; }
  const MatN& direct(int a, int i) const { return direct_[a * k_ + i]; }
  const MatN& connect(int a, int i) const { return connect_[a * k_ + i]; }
  const MatN& strat(int a, int i) const { return strat_[a * k_ + i]; }

 private:
  int n_;
  int k_;
  bool zero_;
  std::vector<MatN> direct_;
  std::vector<MatN> connect_;
  std::vector<MatN> strat_;
};

// Unsymmetrised corrections.
double markovian_correction(const CylinderJet& jet, const CurvatureSums& sums, const VecN& v, const VecN& w);
double stratonovich_correction(const CylinderJet& jet, const CurvatureSums& sums, const VecN& v, const VecN& w);
// D_{nabla_{phi v} phi w} F with the Markovian connection.
double connection_derivative(const CylinderJet& jet, const CurvatureSums& sums, const VecN& v, const VecN& w);
// D_{phi v} D_{phi w} F.
double second_derivative(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi, const VecN& v,
                         const VecN& w);

/* Markovian phi-Hessian: the polarisation (symmetric part) of
   Hess F(phi V, phi V) = Hess^L + sum_i <g_i, int_0^{t_i} R(o dW, h) h>. */
double markovian_phi_hessian(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi, const VecN& v,
                             const VecN& w);
double markovian_phi_hessian(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi, const VecN& v,
                             const VecN& w);
MatN phi_hessian_matrix(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi);
double phi_laplacian(const CylinderJet& jet, const CurvatureSums& sums, const PhiProfile& phi);
double phi_laplacian(const CylinderFunction& F, const FramePath& path, const PhiProfile& phi);
// Trace of the L2 phi-Hessian.
double l2_phi_laplacian(const CylinderJet& jet, const PhiProfile& phi);

}  // namespace pathlab::pathfunc
