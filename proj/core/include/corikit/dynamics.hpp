#pragma once

#include <string>
#include <utility>
#include <vector>

#include "corikit/model.hpp"

namespace corikit {

/// Per-cluster kinematic sweep output. X_parent holds the block transform to
/// the parent cluster (one non-zero 6x6 block per body row, in the column of
/// the attach body); root clusters map the single world frame.
struct KinematicsCache {
  std::vector<MatX> X_parent;              // 6n_k x 6n_parent (root: 6n_k x 6)
  std::vector<VecX> v;                     // stacked body velocities per cluster
  std::vector<MatX> Phi, PhiRing, PhiDot;  // PhiDot = (v x) Phi + PhiRing
  std::vector<VecX> a;                     // stacked accelerations, when requested
  std::vector<SpatialTransform> X_world;   // per body (global index): body <- world
  bool has_accel = false;
};

KinematicsCache forward_kinematics(const MechanismModel& model, const VecX& q, const VecX& v);

/// Kinematics plus the acceleration sweep used by inverse dynamics; the root
/// acceleration is seeded with -a_g when with_gravity is set.
KinematicsCache forward_kinematics_accel(const MechanismModel& model, const VecX& q,
                                         const VecX& v, const VecX& vdot, bool with_gravity);

/// Joint-space inertia matrix via the composite-rigid-body recursion.
MatX mass_matrix(const MechanismModel& model, const VecX& q);

/// Inverse dynamics: tau = H vdot + C v + g (g omitted when with_gravity is
/// false).
VecX rnea(const MechanismModel& model, const VecX& q, const VecX& v, const VecX& vdot,
          bool with_gravity);

VecX gravity_forces(const MechanismModel& model, const VecX& q);

struct FactorizationResult {
  MatX H;
  MatX C;
  std::string method;
};

/// Torsion-free (Christoffel-consistent) Coriolis matrix via the recursive
/// forward/backward sweep; the mass matrix falls out of the same composite
/// inertias at no extra sweeps.
FactorizationResult coriolis_star(const MechanismModel& model, const VecX& q, const VecX& v);

/// Subtree sums of transformed inertias and body-level B factorizations, one
/// (6n_k x 6n_k) pair per cluster, as accumulated by the backward sweep.
struct CompositeCache {
  std::vector<MatX> I_composite;
  std::vector<MatX> B_composite;
};

CompositeCache composite_cache(const MechanismModel& model, const KinematicsCache& cache);

/// C^T v from the joint-rate momentum form; equal for every factorization
/// satisfying the skew property.
VecX coriolis_transpose_times_v(const MechanismModel& model, const VecX& q, const VecX& v);

/// Factorization transport under v = A vbar:
/// returns (A^T H A, A^T C A + A^T H Adot).
std::pair<MatX, MatX> project_factorization(const MatX& C, const MatX& H, const MatX& A,
                                            const MatX& Adot);

/// Stacked body Jacobians A (v_bodies = A vbar) and their rate. Rows follow
/// global body order, 6 per body.
std::pair<MatX, MatX> stacked_jacobians(const MechanismModel& model, const VecX& q,
                                        const VecX& v);

/// Maximal-coordinate factorization blocks: BlockDiag of the per-body
/// single-rigid-body quantities at the current body velocities.
MatX maximal_blockdiag_H(const MechanismModel& model);
MatX maximal_blockdiag_C(const MechanismModel& model, const KinematicsCache& cache);

/// Christoffel-consistent matrix from velocity derivatives of the bias
/// forces plus the structure-constant correction,
///   C* = 1/2 [ d(Cv)/dv + H K ],  K = BlockDiag(Psi_i^T ((Phi_i v_i) x) Phi_i).
/// Requires an open chain whose joints all have PhiRing == 0.
MatX coriolis_via_derivative(const MechanismModel& model, const VecX& q, const VecX& v);

double kinetic_energy(const MechanismModel& model, const VecX& q, const VecX& v);
/// Potential energy for a uniform linear gravity field (the angular part of
/// the model's gravity vector must be zero).
double potential_energy(const MechanismModel& model, const VecX& q);

/// Total spatial momentum expressed in the world frame.
Vec6 world_momentum(const MechanismModel& model, const VecX& q, const VecX& v);

}  // namespace corikit
