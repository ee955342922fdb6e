#pragma once

#include <utility>

#include "corikit/dynamics.hpp"
#include "corikit/tensor3.hpp"

namespace corikit {

/// Pages of spatial cross-product matrices, one per column of V
/// (V x) in R^{6n x 6n x d}.
Tensor3 cross_pages(const MatX& V);

/// Cluster-level B applied to a matrix argument: page l is B(I, V.col(l)).
Tensor3 b_tensor(const MatX& I, const MatX& V);

/// Residuals of the two B-tensor identities used by the tensor Christoffel
/// recursion (exposed as a test utility):
///   B(I,V)^T12 W == ( -B(I,W)^T12 V )^T23
///   B(I,V) W    == (  B(I,W) V + I (W x) V )^T23
std::pair<double, double> b_tensor_identity_residuals(const MatX& I, const MatX& V,
                                                      const MatX& W);

/// Generalized Christoffel symbols by repeated Coriolis evaluations at unit
/// velocities: Gamma(i, j, k) = [C*(q, e_j)]_{ik}. O(N^2 d).
Tensor3 christoffel_sweep(const MechanismModel& model, const VecX& q);

/// Generalized Christoffel symbols via the direct tensor recursion over the
/// cluster tree. O(N d^2); matches christoffel_sweep to round-off.
Tensor3 christoffel_fast(const MechanismModel& model, const VecX& q);

// In-place variants reusing the caller's output tensor; batch evaluation over
// many configurations avoids re-faulting the m^3 output.
void christoffel_sweep_into(const MechanismModel& model, const VecX& q, Tensor3& gamma);
void christoffel_fast_into(const MechanismModel& model, const VecX& q, Tensor3& gamma);

/// se(3) structure constants s^l_{jk} of the body-twist basis fields,
/// stored as S(l, j, k) = [cross_motion(e_j)]_{l k}.
Tensor3 se3_structure_tensor();

}  // namespace corikit
