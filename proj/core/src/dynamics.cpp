#include "corikit/dynamics.hpp"

#include <Eigen/QR>
#include <stdexcept>

namespace corikit {

namespace {

// Stacked block-diagonal inertia of a cluster's bodies.
MatX cluster_inertia(const MechanismModel& model, int k) {
  const auto& cl = model.cluster(k);
  const int n = static_cast<int>(cl.bodies.size());
  MatX I = MatX::Zero(6 * n, 6 * n);
  for (int b = 0; b < n; ++b)
    I.block<6, 6>(6 * b, 6 * b) = model.body_inertia(cl.bodies[b]).matrix();
  return I;
}

// Assembles the block transform to the parent cluster from per-body attach
// transforms. Root clusters map the world frame (parent width 6).
MatX assemble_X_parent(const MechanismModel& model, int k,
                       const std::vector<SpatialTransform>& X_attach) {
  const auto& cl = model.cluster(k);
  const int n = static_cast<int>(cl.bodies.size());
  const int parent_width =
      (cl.parent == -1) ? 6 : 6 * static_cast<int>(model.cluster(cl.parent).bodies.size());
  const int col = (cl.parent == -1) ? 0 : 6 * cl.attach;
  MatX X = MatX::Zero(6 * n, parent_width);
  for (int b = 0; b < n; ++b) X.block<6, 6>(6 * b, col) = X_attach[b].motion_matrix();
  return X;
}

KinematicsCache sweep(const MechanismModel& model, const VecX& q, const VecX& v, bool accel,
                      const VecX& vdot, bool with_gravity) {
  const int Nc = model.num_clusters();
  KinematicsCache cache;
  cache.X_parent.resize(Nc);
  cache.v.resize(Nc);
  cache.Phi.resize(Nc);
  cache.PhiRing.resize(Nc);
  cache.PhiDot.resize(Nc);
  cache.X_world.resize(model.num_bodies());
  cache.has_accel = accel;
  if (accel) cache.a.resize(Nc);

  const Vec6 a0 = with_gravity ? (-model.gravity()).eval() : Vec6::Zero().eval();

  for (int k = 0; k < Nc; ++k) {
    const auto& cl = model.cluster(k);
    const auto kin = model.eval_cluster(k, model.cluster_q(q, k), model.cluster_v(v, k));
    cache.X_parent[k] = assemble_X_parent(model, k, kin.X_attach);
    cache.Phi[k] = kin.Phi;
    cache.PhiRing[k] = kin.PhiRing;

    const int attach_global =
        (cl.parent == -1) ? -1 : model.cluster(cl.parent).bodies[cl.attach];
    for (size_t b = 0; b < cl.bodies.size(); ++b) {
      cache.X_world[cl.bodies[b]] =
          (attach_global == -1) ? kin.X_attach[b]
                                : kin.X_attach[b] * cache.X_world[attach_global];
    }

    const VecX vk = model.cluster_v(v, k);
    if (cl.parent == -1) {
      cache.v[k] = cache.Phi[k] * vk;
    } else {
      cache.v[k] = cache.X_parent[k] * cache.v[cl.parent] + cache.Phi[k] * vk;
    }
    cache.PhiDot[k] = stacked_cross_motion(cache.v[k]) * cache.Phi[k] + cache.PhiRing[k];

    if (accel) {
      const VecX vdk = model.cluster_v(vdot, k);
      const VecX a_par = (cl.parent == -1) ? VecX(a0) : cache.a[cl.parent];
      cache.a[k] = cache.X_parent[k] * a_par + cache.PhiDot[k] * vk + cache.Phi[k] * vdk;
    }
  }
  return cache;
}

}  // namespace

KinematicsCache forward_kinematics(const MechanismModel& model, const VecX& q, const VecX& v) {
  return sweep(model, q, v, false, VecX(), false);
}

KinematicsCache forward_kinematics_accel(const MechanismModel& model, const VecX& q,
                                         const VecX& v, const VecX& vdot, bool with_gravity) {
  return sweep(model, q, v, true, vdot, with_gravity);
}

MatX mass_matrix(const MechanismModel& model, const VecX& q) {
  const int Nc = model.num_clusters();
  const VecX v0 = VecX::Zero(model.nv());
  const KinematicsCache cache = forward_kinematics(model, q, v0);

  std::vector<MatX> Ic(Nc);
  for (int k = 0; k < Nc; ++k) Ic[k] = cluster_inertia(model, k);

  MatX H = MatX::Zero(model.nv(), model.nv());
  for (int j = Nc - 1; j >= 0; --j) {
    const auto& cj = model.cluster(j);
    MatX F = Ic[j] * cache.Phi[j];
    H.block(cj.v_offset, cj.v_offset, cj.nv, cj.nv) = cache.Phi[j].transpose() * F;
    int i = j;
    while (model.cluster(i).parent != -1) {
      F = cache.X_parent[i].transpose() * F;
      i = model.cluster(i).parent;
      const auto& ci = model.cluster(i);
      H.block(ci.v_offset, cj.v_offset, ci.nv, cj.nv) = cache.Phi[i].transpose() * F;
      H.block(cj.v_offset, ci.v_offset, cj.nv, ci.nv) =
          H.block(ci.v_offset, cj.v_offset, ci.nv, cj.nv).transpose();
    }
    if (cj.parent != -1)
      Ic[cj.parent] += cache.X_parent[j].transpose() * Ic[j] * cache.X_parent[j];
  }
  return H;
}

VecX rnea(const MechanismModel& model, const VecX& q, const VecX& v, const VecX& vdot,
          bool with_gravity) {
  const int Nc = model.num_clusters();
  const KinematicsCache cache = forward_kinematics_accel(model, q, v, vdot, with_gravity);

  std::vector<VecX> f(Nc);
  for (int k = 0; k < Nc; ++k) {
    const MatX I = cluster_inertia(model, k);
    f[k] = I * cache.a[k] + stacked_coriolis_B(I, cache.v[k]) * cache.v[k];
  }

  VecX tau = VecX::Zero(model.nv());
  for (int j = Nc - 1; j >= 0; --j) {
    const auto& cj = model.cluster(j);
    tau.segment(cj.v_offset, cj.nv) = cache.Phi[j].transpose() * f[j];
    if (cj.parent != -1) f[cj.parent] += cache.X_parent[j].transpose() * f[j];
  }
  return tau;
}

VecX gravity_forces(const MechanismModel& model, const VecX& q) {
  const VecX z = VecX::Zero(model.nv());
  return rnea(model, q, z, z, true);
}

FactorizationResult coriolis_star(const MechanismModel& model, const VecX& q, const VecX& v) {
  const int Nc = model.num_clusters();
  const int m = model.nv();
  const KinematicsCache cache = forward_kinematics(model, q, v);

  std::vector<MatX> Ic(Nc), Bc(Nc);
  for (int k = 0; k < Nc; ++k) {
    Ic[k] = cluster_inertia(model, k);
    Bc[k] = stacked_coriolis_B(Ic[k], cache.v[k]);
  }

  FactorizationResult out;
  out.method = "recursive";
  out.H = MatX::Zero(m, m);
  out.C = MatX::Zero(m, m);

  for (int j = Nc - 1; j >= 0; --j) {
    const auto& cj = model.cluster(j);
    MatX f1 = Ic[j] * cache.PhiDot[j] + Bc[j] * cache.Phi[j];
    MatX f2 = Ic[j] * cache.Phi[j];
    MatX f3 = Bc[j].transpose() * cache.Phi[j];
    out.C.block(cj.v_offset, cj.v_offset, cj.nv, cj.nv) = cache.Phi[j].transpose() * f1;
    out.H.block(cj.v_offset, cj.v_offset, cj.nv, cj.nv) = cache.Phi[j].transpose() * f2;
    int i = j;
    while (model.cluster(i).parent != -1) {
      f1 = cache.X_parent[i].transpose() * f1;
      f2 = cache.X_parent[i].transpose() * f2;
      f3 = cache.X_parent[i].transpose() * f3;
      i = model.cluster(i).parent;
      const auto& ci = model.cluster(i);
      out.C.block(ci.v_offset, cj.v_offset, ci.nv, cj.nv) = cache.Phi[i].transpose() * f1;
      out.C.block(cj.v_offset, ci.v_offset, cj.nv, ci.nv) =
          (cache.PhiDot[i].transpose() * f2 + cache.Phi[i].transpose() * f3).transpose();
      out.H.block(ci.v_offset, cj.v_offset, ci.nv, cj.nv) = cache.Phi[i].transpose() * f2;
      out.H.block(cj.v_offset, ci.v_offset, cj.nv, ci.nv) =
          out.H.block(ci.v_offset, cj.v_offset, ci.nv, cj.nv).transpose();
    }
    if (cj.parent != -1) {
      Ic[cj.parent] += cache.X_parent[j].transpose() * Ic[j] * cache.X_parent[j];
      Bc[cj.parent] += cache.X_parent[j].transpose() * Bc[j] * cache.X_parent[j];
    }
  }
  return out;
}

CompositeCache composite_cache(const MechanismModel& model, const KinematicsCache& cache) {
  const int Nc = model.num_clusters();
  CompositeCache out;
  out.I_composite.resize(Nc);
  out.B_composite.resize(Nc);
  for (int k = 0; k < Nc; ++k) {
    out.I_composite[k] = cluster_inertia(model, k);
    out.B_composite[k] = stacked_coriolis_B(out.I_composite[k], cache.v[k]);
  }
  for (int j = Nc - 1; j >= 0; --j) {
    const int p = model.cluster(j).parent;
    if (p == -1) continue;
    out.I_composite[p] += cache.X_parent[j].transpose() * out.I_composite[j] * cache.X_parent[j];
    out.B_composite[p] += cache.X_parent[j].transpose() * out.B_composite[j] * cache.X_parent[j];
  }
  return out;
}

VecX coriolis_transpose_times_v(const MechanismModel& model, const VecX& q, const VecX& v) {
  const int Nc = model.num_clusters();
  const KinematicsCache cache = forward_kinematics(model, q, v);

  std::vector<VecX> h(Nc);
  for (int k = 0; k < Nc; ++k) h[k] = cluster_inertia(model, k) * cache.v[k];

  VecX out = VecX::Zero(model.nv());
  for (int j = Nc - 1; j >= 0; --j) {
    const auto& cj = model.cluster(j);
    out.segment(cj.v_offset, cj.nv) = cache.PhiDot[j].transpose() * h[j];
    if (cj.parent != -1) h[cj.parent] += cache.X_parent[j].transpose() * h[j];
  }
  return out;
}

std::pair<MatX, MatX> project_factorization(const MatX& C, const MatX& H, const MatX& A,
                                            const MatX& Adot) {
  if (H.rows() != H.cols() || C.rows() != C.cols() || C.rows() != H.rows() ||
      A.rows() != H.rows() || Adot.rows() != A.rows() || Adot.cols() != A.cols())
    throw std::invalid_argument("project_factorization: shape mismatch");
  return {A.transpose() * H * A, A.transpose() * C * A + A.transpose() * H * Adot};
}

std::pair<MatX, MatX> stacked_jacobians(const MechanismModel& model, const VecX& q,
                                        const VecX& v) {
  const int Nc = model.num_clusters();
  const int m = model.nv();
  const KinematicsCache cache = forward_kinematics(model, q, v);

  std::vector<MatX> J(Nc), Jdot(Nc);
  for (int k = 0; k < Nc; ++k) {
    const auto& cl = model.cluster(k);
    const int rows = 6 * static_cast<int>(cl.bodies.size());
    J[k] = MatX::Zero(rows, m);
    Jdot[k] = MatX::Zero(rows, m);
    const MatX vk_cross = stacked_cross_motion(cache.v[k]);
    if (cl.parent != -1) {
      const MatX& X = cache.X_parent[k];
      const MatX Xdot =
          X * stacked_cross_motion(cache.v[cl.parent]) - vk_cross * X;
      J[k] = X * J[cl.parent];
      Jdot[k] = X * Jdot[cl.parent] + Xdot * J[cl.parent];
    }
    // Entry-wise rate: d/dt (X Phi) = Xdot Phi + X PhiRing; the (v x) Phi
    // part of the ground-frame rate lives inside Xdot here.
    J[k].block(0, cl.v_offset, rows, cl.nv) += cache.Phi[k];
    Jdot[k].block(0, cl.v_offset, rows, cl.nv) += cache.PhiRing[k];
  }

  MatX A = MatX::Zero(model.stacked_dim(), m);
  MatX Adot = MatX::Zero(model.stacked_dim(), m);
  for (int k = 0; k < Nc; ++k) {
    const auto& cl = model.cluster(k);
    A.middleRows(6 * cl.bodies.front(), J[k].rows()) = J[k];
    Adot.middleRows(6 * cl.bodies.front(), J[k].rows()) = Jdot[k];
  }
  return {std::move(A), std::move(Adot)};
}

MatX maximal_blockdiag_H(const MechanismModel& model) {
  MatX H = MatX::Zero(model.stacked_dim(), model.stacked_dim());
  for (int b = 0; b < model.num_bodies(); ++b)
    H.block<6, 6>(6 * b, 6 * b) = model.body_inertia(b).matrix();
  return H;
}

MatX maximal_blockdiag_C(const MechanismModel& model, const KinematicsCache& cache) {
  MatX C = MatX::Zero(model.stacked_dim(), model.stacked_dim());
  for (int k = 0; k < model.num_clusters(); ++k) {
    const auto& cl = model.cluster(k);
    for (size_t b = 0; b < cl.bodies.size(); ++b) {
      const int gb = cl.bodies[b];
      C.block<6, 6>(6 * gb, 6 * gb) =
          body_coriolis_star(model.body_inertia(gb), cache.v[k].segment<6>(6 * b));
    }
  }
  return C;
}

MatX coriolis_via_derivative(const MechanismModel& model, const VecX& q, const VecX& v) {
  if (!model.is_open_chain())
    throw std::invalid_argument("coriolis_via_derivative requires an open-chain model");
  const int m = model.nv();
  for (int k = 0; k < model.num_clusters(); ++k) {
    const auto kin = model.eval_cluster(k, model.cluster_q(q, k), VecX::Ones(model.cluster(k).nv));
    if (kin.PhiRing.cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("coriolis_via_derivative requires PhiRing == 0 joints");
  }

  // d(Cv)/dv by central differences of the bias forces; the bias is exactly
  // quadratic in v, so the stencil error vanishes.
  const double h = 1e-6;
  MatX dCv(m, m);
  for (int k = 0; k < m; ++k) {
    VecX vp = v, vm = v;
    vp[k] += h;
    vm[k] -= h;
    dCv.col(k) =
        (rnea(model, q, vp, VecX::Zero(m), false) - rnea(model, q, vm, VecX::Zero(m), false)) /
        (2.0 * h);
  }

  // Structure-constant correction K = BlockDiag(Psi_i^T ((Phi_i v_i) x) Phi_i)
  // with Psi a dual basis built from a QR orthogonal completion of Phi.
  MatX K = MatX::Zero(m, m);
  for (int k = 0; k < model.num_clusters(); ++k) {
    const auto& cl = model.cluster(k);
    const auto kin = model.eval_cluster(k, model.cluster_q(q, k), model.cluster_v(v, k));
    const MatX& Phi = kin.Phi;  // 6 x nv
    Eigen::HouseholderQR<MatX> qr(Phi);
    const MatX Q = qr.householderQ() * MatX::Identity(6, 6);
    MatX M(6, 6);
    M.leftCols(cl.nv) = Phi;
    M.rightCols(6 - cl.nv) = Q.rightCols(6 - cl.nv);
    const MatX Psi = M.inverse().transpose().leftCols(cl.nv);
    const Vec6 phi_v = Phi * model.cluster_v(v, k);
    K.block(cl.v_offset, cl.v_offset, cl.nv, cl.nv) =
        Psi.transpose() * cross_motion(phi_v) * Phi;
  }

  return 0.5 * (dCv + mass_matrix(model, q) * K);
}

double kinetic_energy(const MechanismModel& model, const VecX& q, const VecX& v) {
  const KinematicsCache cache = forward_kinematics(model, q, v);
  double T = 0.0;
  for (int k = 0; k < model.num_clusters(); ++k)
    T += 0.5 * cache.v[k].dot(cluster_inertia(model, k) * cache.v[k]);
  return T;
}

double potential_energy(const MechanismModel& model, const VecX& q) {
  if (angular_part(model.gravity()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("potential_energy requires a pure linear gravity field");
  const Vec3 g = linear_part(model.gravity());
  const KinematicsCache cache = forward_kinematics(model, q, VecX::Zero(model.nv()));
  double V = 0.0;
  for (int b = 0; b < model.num_bodies(); ++b) {
    const auto& X = cache.X_world[b];
    // world-frame first moment: m * com_world
    const Vec3 h_world =
        model.body_inertia(b).mass() * X.translation() +
        X.rotation().transpose() * model.body_inertia(b).first_moment();
    V -= g.dot(h_world);
  }
  return V;
}

Vec6 world_momentum(const MechanismModel& model, const VecX& q, const VecX& v) {
  const KinematicsCache cache = forward_kinematics(model, q, v);
  Vec6 h = Vec6::Zero();
  for (int k = 0; k < model.num_clusters(); ++k) {
    const auto& cl = model.cluster(k);
    for (size_t b = 0; b < cl.bodies.size(); ++b) {
      const int gb = cl.bodies[b];
      const Vec6 hb = model.body_inertia(gb).apply(cache.v[k].segment<6>(6 * b));
      h += cache.X_world[gb].motion_matrix().transpose() * hb;
    }
  }
  return h;
}

}  // namespace corikit
