#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pathlab/malliavin/process.hpp"

namespace pathlab::malliavin {

/* Running Stratonovich curvature A_t = int_0^t R(o dW, k) at every knot,
   for a direction process k.  Shared by the connections below. */
std::vector<MatN> curvature_matrices(const AdaptedProcess& k, const PathContext& ctx);

/* Markovian connection nabla_{Uk} Uh.  Its rate is A_j h'_j with A frozen at
   the left knot (plus D_{Uk} h'_j when h is pathwise), integrated from 0.
   `dh` holds the per-step rates D_{Uk} h'_j; a pathwise h without it is
   rejected. */
AdaptedProcess markovian_connection(const AdaptedProcess& k, const AdaptedProcess& h, const PathContext& ctx,
                                    std::span<const VecN> dh = {});
AdaptedProcess markovian_connection(std::span<const MatN> a, const AdaptedProcess& h, std::span<const VecN> dh = {});

// Cartan connection: rate D_{Uk} h'_j; zero for deterministic h.
AdaptedProcess cartan_connection(const AdaptedProcess& k, const AdaptedProcess& h, const PathContext& ctx,
                                 std::span<const VecN> dh = {});

/* D_V of the rate of hat(w) for deterministic w and direction process v:
     (nabla Ric)(v, w) + Ric_k A_k wbar_k - A_k Ric_k wbar_k,
   wbar_k = (w_k + w_{k+1})/2.  Zero on Einstein models. */
std::vector<VecN> dv_hat_dot(const AdaptedProcess& w, std::span<const MatN> a, const PathContext& ctx);
std::vector<VecN> dv_hat_dot(const AdaptedProcess& v, const AdaptedProcess& w, const PathContext& ctx);

// nabla_V hat(W) for deterministic w (the Markovian connection of hat(w)
// with the derivative oracle above).
AdaptedProcess connection_of_hat(const AdaptedProcess& v, const AdaptedProcess& w, const PathContext& ctx);

// Modified connection: hat_inverse(nabla_V hat(W)).
AdaptedProcess modified_connection(const AdaptedProcess& v, const AdaptedProcess& w, const PathContext& ctx);

/* Pathwise squared H-norms of sum_a nabla_{V_a} V_a and
   sum_a nabla_{V_a} hat(V_a) for V_a = phi e_a. */
std::pair<double, double> error_norms(const PhiProfile& phi, const PathContext& ctx);

}  // namespace pathlab::malliavin
