#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "corikit/dynamics.hpp"
#include "corikit/tensor3.hpp"

// Brute-force verifiers and seeded generators used by the test suites.
// Everything here is independent of the recursive algorithm implementations
// it is used to check (mass_matrix is the one shared entry point, and is
// itself dual-checked against stacked Jacobians).
namespace corikit::oracles {

/// Deterministic generator; identical sequences for identical seeds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double gaussian();
  Vec3 unit_vector();
  VecX vector(int n, double lo = -1.0, double hi = 1.0);

 private:
  std::uint64_t next();
  std::uint64_t state_;
};

/// Inertia with a positive-semidefinite pseudo-inertia by construction.
SpatialInertia random_inertia(Rng& rng);
InertialParams random_params(Rng& rng);

/// Random admissible configuration and velocity for a model.
struct State {
  VecX q, v;
};
State random_state(const MechanismModel& model, std::uint64_t seed);

/// Serial chain of N single-dof/spherical joints with random geometry.
MechanismModel random_open_chain(int n_bodies, std::uint64_t seed,
                                 bool coordinate_joints_only = false);

/// Balanced binary tree of revolute bodies (heap parent layout).
MechanismModel balanced_revolute_tree(int n_bodies, std::uint64_t seed);

/// Largest symmetric part entry: max|M + M^T|_ij. Zero iff M is skew.
double skew_check(const MatX& M);

/// Central-difference rate of the mass matrix along the flow direction v:
/// (H(q + h v) - H(q - h v)) / 2h with quaternion blocks perturbed via the
/// exponential map.
MatX fd_mass_matrix_rate(const MechanismModel& model, const VecX& q, const VecX& v, double h);

/// Richardson-extrapolated variant, (4 D(h/2) - D(h)) / 3; used when a check
/// lands near its tolerance.
MatX fd_mass_matrix_rate_richardson(const MechanismModel& model, const VecX& q, const VecX& v,
                                    double h);

/// Coordinate Christoffel symbols of the first kind by central differences
/// of the mass matrix:
///   Gamma_ijk = 1/2 [ dH_ij/dq^k + dH_ik/dq^j - dH_jk/dq^i ].
/// Requires a model with coordinate joints only.
Tensor3 fd_christoffel_coordinates(const MechanismModel& model, const VecX& q, double h);

/// Skew, velocity-annihilating perturbation assembled from three-index
/// selectors: S(v) = sum beta_{ijk} P^T ((P v) x3) P over chosen triples.
/// Satisfies S(v) v == 0 and S + S^T == 0 for every v.
MatX three_form_skew(int m, const VecX& v, const std::vector<std::array<int, 3>>& triples,
                     const VecX& betas);

}  // namespace corikit::oracles
