#include "corikit/simkit.hpp"

#include <cmath>
#include <stdexcept>

#include "corikit/oracles.hpp"

namespace corikit {

SlidingVars sliding_variable(const VecX& q, const VecX& v, const TrackingReference& ref,
                             double t) {
  SlidingVars out;
  out.e = q - ref.qd(t);
  out.v_r = ref.qd_dot(t) - ref.lambda * out.e;
  out.vr_dot = ref.qd_ddot(t) - ref.lambda * (v - ref.qd_dot(t));
  out.s = v - out.v_r;
  return out;
}

namespace {

MatX chosen_coriolis(const MechanismModel& model, const FactorizationChoice& choice,
                     const VecX& q, const VecX& v) {
  switch (choice.kind) {
    case FactorizationKind::torsion_free:
      return coriolis_star(model, q, v).C;
    case FactorizationKind::torsioned_beta: {
      if (model.nv() != 3)
        throw std::invalid_argument("beta (v x) factorization applies to 3-DoF models only");
      return choice.beta(q) * skew(v.head<3>());
    }
    case FactorizationKind::custom:
      return choice.custom(q, v);
  }
  throw std::logic_error("bad factorization kind");
}

// Every factorization choice must satisfy Hdot = C + C^T on the model it is
// applied to; probed numerically on a few states before a run.
void check_skew_compatibility(const MechanismModel& model, const FactorizationChoice& choice,
                              const VecX& q0, const VecX& v0) {
  VecX q = q0;
  VecX v = v0;
  for (int trial = 0; trial < 3; ++trial) {
    const MatX C = chosen_coriolis(model, choice, q, v);
    const MatX Hdot = oracles::fd_mass_matrix_rate(model, q, v, 1e-6);
    const double scale = 1.0 + Hdot.cwiseAbs().maxCoeff() + C.cwiseAbs().maxCoeff();
    if ((Hdot - C - C.transpose()).cwiseAbs().maxCoeff() > 1e-5 * scale)
      throw std::invalid_argument(
          "factorization choice violates the skew property on this model");
    oracles::Rng rng(41 + trial);
    q = model.integrate_config(q, rng.vector(model.nv()), 0.7);
    v = rng.vector(model.nv());
  }
}

}  // namespace

VecX passivity_controller(const MechanismModel& model, const VecX& q, const VecX& v,
                          const TrackingReference& ref, double t, const VecX& theta_hat,
                          const MatX& KD, const FactorizationChoice& choice) {
  const SlidingVars sv = sliding_variable(q, v, ref, t);
  if (choice.kind == FactorizationKind::torsion_free) {
    return direct_adaptive_step(model, q, v, sv.v_r, sv.vr_dot, theta_hat, KD).first;
  }
  const MechanismModel est = model.with_theta(theta_hat);
  const MatX C = chosen_coriolis(model, choice, q, v);
  return mass_matrix(est, q) * sv.vr_dot + C * sv.v_r + gravity_forces(est, q) - KD * sv.s;
}

SimLog simulate(const MechanismModel& model, const VecX& q0, const VecX& v0,
                const ControllerConfig& controller, const SimOptions& options) {
  if (options.dt <= 0.0) throw std::invalid_argument("dt must be positive");
  const int nq = model.nq();
  const int m = model.nv();
  const int P = 10 * model.num_bodies();
  const bool control = controller.mode == ControllerConfig::Mode::passivity;
  const bool adapt = control && controller.adapt;
  const int steps = static_cast<int>(std::llround(options.t_final / options.dt));

  if (control) check_skew_compatibility(model, controller.factorization, q0, v0);

  SimLog log;
  log.dt = options.dt;
  log.times.resize(steps + 1);
  log.q.resize(steps + 1, nq);
  log.v.resize(steps + 1, m);
  log.s.resize(steps + 1, m);
  log.tau.resize(steps + 1, m);
  if (adapt) log.theta_hat.resize(steps + 1, P);
  switch (controller.factorization.kind) {
    case FactorizationKind::torsion_free: log.factorization_tag = "star"; break;
    case FactorizationKind::torsioned_beta: log.factorization_tag = "beta"; break;
    case FactorizationKind::custom: log.factorization_tag = "custom"; break;
  }

  VecX q = q0, v = v0;
  VecX theta = control ? controller.theta_hat0 : VecX::Zero(P);

  struct Held {
    VecX tau, yts;
  };

  // One derivative evaluation: returns (q_dot, v_dot, theta_dot) and the
  // controller outputs used (held across stages under zero-order hold).
  const auto eval = [&](double t, const VecX& qq, const VecX& vv, const VecX& th,
                        const Held* hold, VecX& qd, VecX& vd, VecX& thd, Held& used) {
    VecX tau = VecX::Zero(m);
    VecX yts = VecX::Zero(P);
    if (control) {
      if (hold) {
        tau = hold->tau;
        yts = hold->yts;
      } else {
        const SlidingVars sv = sliding_variable(qq, vv, controller.reference, t);
        if (controller.factorization.kind == FactorizationKind::torsion_free) {
          auto pr = direct_adaptive_step(model, qq, vv, sv.v_r, sv.vr_dot, th, controller.KD);
          tau = pr.first;
          yts = pr.second;
        } else {
          tau = passivity_controller(model, qq, vv, controller.reference, t, th, controller.KD,
                                     controller.factorization);
          if (adapt) {
            const auto b = regressor_bundle(model, qq, vv, sv.v_r, sv.vr_dot);
            yts = b.Y.transpose() * sv.s;
          }
        }
      }
    }
    qd = model.config_rate(qq, vv);
    const VecX bias = rnea(model, qq, vv, VecX::Zero(m), true);
    vd = mass_matrix(model, qq).ldlt().solve(tau - bias);
    thd = adapt ? VecX(-yts) : VecX::Zero(P);
    used.tau = std::move(tau);
    used.yts = std::move(yts);
  };

  for (int n = 0; n <= steps; ++n) {
    const double t = n * options.dt;
    log.times[n] = t;
    log.q.row(n) = q.transpose();
    log.v.row(n) = v.transpose();
    if (control) {
      log.s.row(n) = sliding_variable(q, v, controller.reference, t).s.transpose();
    } else {
      log.s.row(n).setZero();
    }
    if (adapt) log.theta_hat.row(n) = theta.transpose();

    if (!q.allFinite() || !v.allFinite())
      throw std::runtime_error("simulation diverged (non-finite state) at t = " +
                               std::to_string(t));

    VecX k1q(nq), k1v(m), k1th(P);
    Held first, scratch;
    eval(t, q, v, theta, nullptr, k1q, k1v, k1th, first);
    log.tau.row(n) = first.tau.transpose();
    if (n == steps) break;

    const double h = options.dt;
    const Held* hold = controller.per_stage ? nullptr : &first;
    VecX k2q(nq), k2v(m), k2th(P), k3q(nq), k3v(m), k3th(P), k4q(nq), k4v(m), k4th(P);
    eval(t + 0.5 * h, q + 0.5 * h * k1q, v + 0.5 * h * k1v, theta + 0.5 * h * k1th, hold, k2q,
         k2v, k2th, scratch);
    eval(t + 0.5 * h, q + 0.5 * h * k2q, v + 0.5 * h * k2v, theta + 0.5 * h * k2th, hold, k3q,
         k3v, k3th, scratch);
    eval(t + h, q + h * k3q, v + h * k3v, theta + h * k3th, hold, k4q, k4v, k4th, scratch);

    q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    theta += (h / 6.0) * (k1th + 2.0 * k2th + 2.0 * k3th + k4th);
    model.normalize_config(q);
  }
  return log;
}

VecX lyapunov_series(const MechanismModel& model, const SimLog& log, const VecX& theta_true,
                     const VecX& theta_hat_fixed) {
  const Eigen::Index T = log.times.size();
  VecX V(T);
  for (Eigen::Index n = 0; n < T; ++n) {
    const VecX q = log.q.row(n).transpose();
    const VecX s = log.s.row(n).transpose();
    const VecX th = log.theta_hat.size() ? VecX(log.theta_hat.row(n).transpose())
                                         : theta_hat_fixed;
    const VecX tilde = th - theta_true;
    V[n] = 0.5 * s.dot(mass_matrix(model, q) * s) + 0.5 * tilde.squaredNorm();
  }
  return V;
}

double highpass_energy(const MatX& series, double dt, double f_cut) {
  const Eigen::Index T = series.rows();
  if (T < 2) return 0.0;
  const int kmax = static_cast<int>(std::floor(f_cut * T * dt));
  double high = 0.0;
  for (Eigen::Index c = 0; c < series.cols(); ++c) {
    const double total = series.col(c).squaredNorm();
    double low = 0.0;
    for (int k = 0; k <= kmax; ++k) {
      double re = 0.0, im = 0.0;
      const double w = 2.0 * M_PI * k / static_cast<double>(T);
      for (Eigen::Index n = 0; n < T; ++n) {
        re += series(n, c) * std::cos(w * n);
        im -= series(n, c) * std::sin(w * n);
      }
      const double mag2 = (re * re + im * im) / static_cast<double>(T);
      // one-sided: mirror every bin except DC and (for even T) Nyquist
      low += (k == 0 || 2 * k == T) ? mag2 : 2.0 * mag2;
    }
    high += std::max(total - low, 0.0);
  }
  return high;
}

TrackingReference point_mass_reference(double lambda) {
  TrackingReference ref;
  ref.lambda = lambda;
  ref.qd = [](double t) { return VecX(Vec3(t + std::sin(t), 0.0, 0.0)); };
  ref.qd_dot = [](double t) { return VecX(Vec3(1.0 + std::cos(t), 0.0, 0.0)); };
  ref.qd_ddot = [](double t) { return VecX(Vec3(-std::sin(t), 0.0, 0.0)); };
  return ref;
}

void point_mass_initial_state(VecX& q0, VecX& v0) {
  q0 = Vec3(0.0, 0.5, 0.0);
  v0 = Vec3(0.0, -1.0, 0.0);
}

}  // namespace corikit
