#pragma once

#include <functional>
#include <string>

#include "corikit/adaptive.hpp"
#include "corikit/dynamics.hpp"

namespace corikit {

/// Desired trajectory in coordinates plus the sliding-mode gain. Only
/// meaningful for coordinate models (q_dot == v).
struct TrackingReference {
  std::function<VecX(double)> qd, qd_dot, qd_ddot;
  double lambda = 1.0;
};

struct SlidingVars {
  VecX e;       // q - q_d
  VecX v_r;     // qd_dot - lambda e
  VecX vr_dot;  // qd_ddot - lambda (v - qd_dot)
  VecX s;       // v - v_r
};

SlidingVars sliding_variable(const VecX& q, const VecX& v, const TrackingReference& ref,
                             double t);

enum class FactorizationKind { torsion_free, torsioned_beta, custom };

/// Coriolis factorization used inside the control law. torsioned_beta is the
/// point-mass family C = beta(q) (v x3) (3-DoF models only); custom supplies
/// an arbitrary matrix function, skew-checked at runtime.
struct FactorizationChoice {
  FactorizationKind kind = FactorizationKind::torsion_free;
  std::function<double(const VecX& q)> beta;
  std::function<MatX(const VecX& q, const VecX& v)> custom;

  static FactorizationChoice TorsionFree() { return {}; }
  static FactorizationChoice Beta(double value) {
    FactorizationChoice c;
    c.kind = FactorizationKind::torsioned_beta;
    c.beta = [value](const VecX&) { return value; };
    return c;
  }
};

/// Certainty-equivalence tracking law
///   tau = H_hat vdot_r + C_hat v_r + g_hat - K_D s
/// with C_hat chosen per `choice`. The torsion-free route evaluates through
/// the adaptive-control recursion without forming dense matrices.
VecX passivity_controller(const MechanismModel& model, const VecX& q, const VecX& v,
                          const TrackingReference& ref, double t, const VecX& theta_hat,
                          const MatX& KD, const FactorizationChoice& choice);

struct ControllerConfig {
  enum class Mode { none, passivity };
  Mode mode = Mode::none;
  TrackingReference reference;
  FactorizationChoice factorization;
  VecX theta_hat0;
  MatX KD;
  bool adapt = false;      // theta_hat_dot = -Y^T s
  bool per_stage = true;   // re-evaluate the controller inside RK stages
};

struct SimOptions {
  double dt = 1e-3;
  double t_final = 1.0;
};

struct SimLog {
  VecX times;
  MatX q;          // T x nq (raw configuration incl. quaternions)
  MatX v;          // T x m
  MatX s;          // T x m (zero when uncontrolled)
  MatX tau;        // T x m
  MatX theta_hat;  // T x P when adapting, else 0 x 0
  double dt = 0.0;
  std::string factorization_tag;
};

/// Fixed-step RK4 closed-loop simulation; quaternions are renormalized once
/// per step. Throws on non-finite state with a time-stamped diagnostic.
SimLog simulate(const MechanismModel& model, const VecX& q0, const VecX& v0,
                const ControllerConfig& controller, const SimOptions& options);

/// V(t) = 1/2 s^T H(q) s + 1/2 theta_tilde^T theta_tilde along a log.
/// theta_true supplies the parameter error; for non-adaptive runs the
/// initial estimate is used throughout.
VecX lyapunov_series(const MechanismModel& model, const SimLog& log, const VecX& theta_true,
                     const VecX& theta_hat_fixed);

/// Signal energy above f_cut, summed over columns (discrete Parseval minus
/// the low-frequency bins).
double highpass_energy(const MatX& series, double dt, double f_cut);

/// The bundled point-mass tracking experiment: reference
/// q_d(t) = [t + sin t, 0, 0] with an offset, sideways-moving start.
TrackingReference point_mass_reference(double lambda);
void point_mass_initial_state(VecX& q0, VecX& v0);

}  // namespace corikit
