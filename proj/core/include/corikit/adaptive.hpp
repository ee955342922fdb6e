#pragma once

#include <utility>
#include <vector>

#include "corikit/dynamics.hpp"

namespace corikit {

/// Body-level regressor: the 6x10 matrix Y with
///   Y theta == I(theta) a + B(I(theta), v) w   for every parameter vector.
Eigen::Matrix<double, 6, 10> body_regressor(const Vec6& a, const Vec6& v, const Vec6& w);

/// The regressor family over the 10-per-body inertial parameters:
///   Y      theta == H vdot_r + C* v_r + g
///   Y_p    theta == H v            (generalized momentum)
///   Y_g    theta == g
///   Y_c    theta == C*^T v
///   Y_T    theta == 1/2 v^T H v    (kinetic energy)
///   Y_Vdot theta == v^T g          (potential rate)
struct RegressorBundle {
  MatX Y, Yp, Yg, Yc;
  Eigen::RowVectorXd YT, YVdot;
};

RegressorBundle regressor_bundle(const MechanismModel& model, const VecX& q, const VecX& v,
                                 const VecX& vr, const VecX& vrdot);

struct AdaptiveState {
  VecX theta_hat;   // 10 * num_bodies
  MatX KD;          // symmetric positive definite damping gain
  double lambda = 10.0;  // filter pole (rad/s)
};

/// One evaluation of the direct adaptive control recursion. Returns the
/// control torque tau = Y theta_hat - K_D s and the update direction Y^T s,
/// both computed without forming the dense regressor.
std::pair<VecX, VecX> direct_adaptive_step(const MechanismModel& model, const VecX& q,
                                           const VecX& v, const VecX& vr, const VecX& vrdot,
                                           const VecX& theta_hat, const MatX& KD);

struct TrajectorySample {
  double t;
  VecX q, v, tau;
};

/// Filtered momentum / energy identification residuals over a uniformly
/// sampled trajectory. For the first-order filter with pole lambda,
///   e(t) = Filt(tau) - [ lambda p(t) - w(t) p(0) - Filt(lambda p + C^T v - g) ]
/// with w(t) = lambda exp(-lambda t), all parameter-dependent quantities
/// evaluated at theta_eval. The per-sample filtered regressor stack R
/// satisfies e = Filt(tau) + R theta_eval exactly under the trapezoidal
/// discretization.
struct FilteredIdentification {
  VecX times;
  MatX momentum_residual;                  // T x m
  VecX energy_residual;                    // T
  std::vector<MatX> momentum_regressor;    // T entries of m x 10 N_B (if requested)
};

FilteredIdentification filtered_identification(const MechanismModel& model,
                                               const std::vector<TrajectorySample>& samples,
                                               double lambda, const VecX& theta_eval,
                                               bool keep_regressors = false);

}  // namespace corikit
