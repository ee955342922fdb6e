#include "corikit/adaptive.hpp"

#include <cmath>
#include <stdexcept>

namespace corikit {

Eigen::Matrix<double, 6, 10> body_regressor(const Vec6& a, const Vec6& v, const Vec6& w) {
  // I(theta) and B(I, .) are linear in theta; evaluate on the parameter basis.
  Eigen::Matrix<double, 6, 10> Y;
  for (int p = 0; p < 10; ++p) {
    const SpatialInertia I = SpatialInertia::FromParams(InertialParams::Unit(p));
    Y.col(p) = I.matrix() * a + body_coriolis_B(I, v) * w;
  }
  return Y;
}

namespace {

// Cluster-level regressor: BlockDiag of per-body 6x10 blocks, so that
// Ycl theta_cluster == I a + B(I, v) w on stacked arguments.
MatX cluster_regressor(const VecX& a, const VecX& v, const VecX& w) {
  const int n = static_cast<int>(a.size() / 6);
  MatX Y = MatX::Zero(6 * n, 10 * n);
  for (int b = 0; b < n; ++b)
    Y.block<6, 10>(6 * b, 10 * b) =
        body_regressor(a.segment<6>(6 * b), v.segment<6>(6 * b), w.segment<6>(6 * b));
  return Y;
}

struct ReferenceSweep {
  KinematicsCache kin;       // true-velocity kinematics (v, PhiDot, transforms)
  std::vector<VecX> w;       // reference-velocity transport
  std::vector<VecX> a;       // reference accelerations, gravity-seeded
  std::vector<VecX> a_g;     // transported gravity acceleration
};

ReferenceSweep reference_sweep(const MechanismModel& model, const VecX& q, const VecX& v,
                               const VecX& vr, const VecX& vrdot) {
  ReferenceSweep s;
  s.kin = forward_kinematics(model, q, v);
  const int Nc = model.num_clusters();
  s.w.resize(Nc);
  s.a.resize(Nc);
  s.a_g.resize(Nc);
  const Vec6 a0 = -model.gravity();
  for (int k = 0; k < Nc; ++k) {
    const auto& cl = model.cluster(k);
    const VecX vrk = model.cluster_v(vr, k);
    const VecX vrdk = model.cluster_v(vrdot, k);
    if (cl.parent == -1) {
      s.w[k] = s.kin.Phi[k] * vrk;
      s.a[k] = s.kin.X_parent[k] * a0 + s.kin.PhiDot[k] * vrk + s.kin.Phi[k] * vrdk;
      s.a_g[k] = s.kin.X_parent[k] * a0;
    } else {
      s.w[k] = s.kin.X_parent[k] * s.w[cl.parent] + s.kin.Phi[k] * vrk;
      s.a[k] = s.kin.X_parent[k] * s.a[cl.parent] + s.kin.PhiDot[k] * vrk + s.kin.Phi[k] * vrdk;
      s.a_g[k] = s.kin.X_parent[k] * s.a_g[cl.parent];
    }
  }
  return s;
}

}  // namespace

RegressorBundle regressor_bundle(const MechanismModel& model, const VecX& q, const VecX& v,
                                 const VecX& vr, const VecX& vrdot) {
  const int Nc = model.num_clusters();
  const int m = model.nv();
  const int P = 10 * model.num_bodies();
  const ReferenceSweep s = reference_sweep(model, q, v, vr, vrdot);

  std::vector<MatX> F(Nc), Hm(Nc), G(Nc);
  RegressorBundle out;
  out.Y = MatX::Zero(m, P);
  out.Yp = MatX::Zero(m, P);
  out.Yg = MatX::Zero(m, P);
  out.Yc = MatX::Zero(m, P);
  out.YT = Eigen::RowVectorXd::Zero(P);
  out.YVdot = Eigen::RowVectorXd::Zero(P);

  for (int k = 0; k < Nc; ++k) {
    const VecX zero = VecX::Zero(s.kin.v[k].size());
    F[k] = cluster_regressor(s.a[k], s.kin.v[k], s.w[k]);
    Hm[k] = cluster_regressor(s.kin.v[k], zero, zero);
    G[k] = cluster_regressor(s.a_g[k], zero, zero);
    const int pcol = 10 * model.cluster(k).bodies.front();
    const int pw = static_cast<int>(Hm[k].cols());
    out.YT.segment(pcol, pw) = 0.5 * s.kin.v[k].transpose() * Hm[k];
    out.YVdot.segment(pcol, pw) = s.kin.v[k].transpose() * G[k];
  }

  for (int j = Nc - 1; j >= 0; --j) {
    const auto& cj = model.cluster(j);
    const int pcol = 10 * cj.bodies.front();
    const int pw = static_cast<int>(F[j].cols());
    int i = j;
    while (i != -1) {
      const auto& ci = model.cluster(i);
      out.Y.block(ci.v_offset, pcol, ci.nv, pw) = s.kin.Phi[i].transpose() * F[j];
      out.Yp.block(ci.v_offset, pcol, ci.nv, pw) = s.kin.Phi[i].transpose() * Hm[j];
      out.Yc.block(ci.v_offset, pcol, ci.nv, pw) = s.kin.PhiDot[i].transpose() * Hm[j];
      out.Yg.block(ci.v_offset, pcol, ci.nv, pw) = s.kin.Phi[i].transpose() * G[j];
      if (ci.parent != -1) {
        F[j] = s.kin.X_parent[i].transpose() * F[j];
        Hm[j] = s.kin.X_parent[i].transpose() * Hm[j];
        G[j] = s.kin.X_parent[i].transpose() * G[j];
      }
      i = ci.parent;
    }
  }
  return out;
}

std::pair<VecX, VecX> direct_adaptive_step(const MechanismModel& model, const VecX& q,
                                           const VecX& v, const VecX& vr, const VecX& vrdot,
                                           const VecX& theta_hat, const MatX& KD) {
  const int Nc = model.num_clusters();
  const ReferenceSweep s = reference_sweep(model, q, v, vr, vrdot);

  std::vector<VecX> f(Nc);
  VecX yts = VecX::Zero(theta_hat.size());
  for (int k = 0; k < Nc; ++k) {
    const auto& cl = model.cluster(k);
    const int n = static_cast<int>(cl.bodies.size());
    MatX Ihat = MatX::Zero(6 * n, 6 * n);
    for (int b = 0; b < n; ++b)
      Ihat.block<6, 6>(6 * b, 6 * b) =
          SpatialInertia::FromParams(theta_hat.segment<10>(10 * cl.bodies[b])).matrix();
    f[k] = Ihat * s.a[k] + stacked_coriolis_B(Ihat, s.kin.v[k]) * s.w[k];
    const MatX Ycl = cluster_regressor(s.a[k], s.kin.v[k], s.w[k]);
    yts.segment(10 * cl.bodies.front(), Ycl.cols()) =
        Ycl.transpose() * (s.kin.v[k] - s.w[k]);
  }

  VecX tau = VecX::Zero(model.nv());
  for (int j = Nc - 1; j >= 0; --j) {
    const auto& cj = model.cluster(j);
    tau.segment(cj.v_offset, cj.nv) = s.kin.Phi[j].transpose() * f[j];
    if (cj.parent != -1) f[cj.parent] += s.kin.X_parent[j].transpose() * f[j];
  }
  tau -= KD * (v - vr);
  return {std::move(tau), std::move(yts)};
}

FilteredIdentification filtered_identification(const MechanismModel& model,
                                               const std::vector<TrajectorySample>& samples,
                                               double lambda, const VecX& theta_eval,
                                               bool keep_regressors) {
  const size_t T = samples.size();
  if (T < 2) throw std::invalid_argument("filtered_identification needs at least two samples");
  const double dt = samples[1].t - samples[0].t;
  for (size_t n = 1; n < T; ++n) {
    if (std::abs((samples[n].t - samples[n - 1].t) - dt) > 1e-9 * (1.0 + std::abs(dt)))
      throw std::invalid_argument("filtered_identification requires uniform sampling");
  }

  const int m = model.nv();
  const int P = 10 * model.num_bodies();
  const VecX zero = VecX::Zero(m);

  FilteredIdentification out;
  out.times.resize(T);
  out.momentum_residual.resize(T, m);
  out.energy_residual.resize(T);
  if (keep_regressors) out.momentum_regressor.resize(T);

  // Trapezoidal convolution with the exact exponential kernel
  // w(t) = lambda exp(-lambda t), in recursive form.
  const double decay = std::exp(-lambda * dt);
  VecX filt_tau = VecX::Zero(m);
  MatX filt_R = MatX::Zero(m, P);          // Filt(lambda Y_p + Y_c - Y_g)
  double filt_vtau = 0.0;
  Eigen::RowVectorXd filt_RT = Eigen::RowVectorXd::Zero(P);  // Filt(lambda Y_T - Y_Vdot)

  VecX tau_prev;
  MatX R_prev;
  Eigen::RowVectorXd RT_prev;
  MatX Yp0;
  Eigen::RowVectorXd YT0;
  double vtau_prev_scalar = 0.0;

  for (size_t n = 0; n < T; ++n) {
    const auto& smp = samples[n];
    const RegressorBundle b = regressor_bundle(model, smp.q, smp.v, zero, zero);
    const MatX R_inst = lambda * b.Yp + b.Yc - b.Yg;
    const Eigen::RowVectorXd RT_inst = lambda * b.YT - b.YVdot;
    const double vtau = smp.v.dot(smp.tau);

    if (n == 0) {
      Yp0 = b.Yp;
      YT0 = b.YT;
    } else {
      const double c_new = 0.5 * dt * lambda;
      const double c_old = 0.5 * dt * lambda * decay;
      filt_tau = decay * filt_tau + c_old * tau_prev + c_new * smp.tau;
      filt_R = decay * filt_R + c_old * R_prev + c_new * R_inst;
      filt_vtau = decay * filt_vtau + c_old * vtau_prev_scalar + c_new * vtau;
      filt_RT = decay * filt_RT + c_old * RT_prev + c_new * RT_inst;
    }
    tau_prev = smp.tau;
    R_prev = R_inst;
    RT_prev = RT_inst;
    vtau_prev_scalar = vtau;

    const double w_t = lambda * std::exp(-lambda * (smp.t - samples[0].t));
    // e = Filt(tau) + [ -lambda Y_p(t) + w(t) Y_p(0) + Filt(...) ] theta
    const MatX Rstack = -lambda * b.Yp + w_t * Yp0 + filt_R;
    out.times[n] = smp.t;
    out.momentum_residual.row(n) = (filt_tau + Rstack * theta_eval).transpose();
    out.energy_residual[n] =
        filt_vtau + (-lambda * b.YT + w_t * YT0 + filt_RT).dot(theta_eval);
    if (keep_regressors) out.momentum_regressor[n] = Rstack;
  }
  return out;
}

}  // namespace corikit
