#include "corikit/christoffel.hpp"

namespace corikit {

Tensor3 cross_pages(const MatX& V) {
  Tensor3 out(V.rows(), V.rows(), V.cols());
  for (Eigen::Index l = 0; l < V.cols(); ++l) out.page(l) = stacked_cross_motion(V.col(l));
  return out;
}

Tensor3 b_tensor(const MatX& I, const MatX& V) {
  Tensor3 out(I.rows(), I.cols(), V.cols());
  for (Eigen::Index l = 0; l < V.cols(); ++l) out.page(l) = stacked_coriolis_B(I, V.col(l));
  return out;
}

std::pair<double, double> b_tensor_identity_residuals(const MatX& I, const MatX& V,
                                                      const MatX& W) {
  const Tensor3 BV = b_tensor(I, V);
  const Tensor3 BW = b_tensor(I, W);
  const Tensor3 lhs1 = BV.transpose12() * W;
  const Tensor3 rhs1 = (-(BW.transpose12() * V)).transpose23();
  const Tensor3 lhs2 = BV * W;
  const Tensor3 rhs2 = (BW * V + I * (cross_pages(W) * V)).transpose23();
  return {(lhs1 - rhs1).max_abs(), (lhs2 - rhs2).max_abs()};
}

Tensor3 christoffel_sweep(const MechanismModel& model, const VecX& q) {
  Tensor3 gamma;
  christoffel_sweep_into(model, q, gamma);
  return gamma;
}

void christoffel_sweep_into(const MechanismModel& model, const VecX& q, Tensor3& gamma) {
  const int m = model.nv();
  gamma.reset(m, m, m);
  for (int j = 0; j < m; ++j) {
    const auto fact = coriolis_star(model, q, VecX::Unit(m, j));
    for (int k = 0; k < m; ++k) gamma.page(k).col(j) = fact.C.col(k);
  }
}

Tensor3 christoffel_fast(const MechanismModel& model, const VecX& q) {
  Tensor3 gamma;
  christoffel_fast_into(model, q, gamma);
  return gamma;
}

void christoffel_fast_into(const MechanismModel& model, const VecX& q, Tensor3& gamma) {
  const int Nc = model.num_clusters();
  const int m = model.nv();

  std::vector<MatX> X(Nc), Phi(Nc), Ic(Nc);
  std::vector<Tensor3> D(Nc);
  for (int k = 0; k < Nc; ++k) {
    const auto& cl = model.cluster(k);
    const auto kin = model.eval_cluster(k, model.cluster_q(q, k), VecX::Zero(cl.nv));
    MatX Xp = MatX::Zero(6 * cl.bodies.size(),
                         (cl.parent == -1) ? 6 : 6 * model.cluster(cl.parent).bodies.size());
    const int col = (cl.parent == -1) ? 0 : 6 * cl.attach;
    for (size_t b = 0; b < cl.bodies.size(); ++b)
      Xp.block<6, 6>(6 * b, col) = kin.X_attach[b].motion_matrix();
    X[k] = std::move(Xp);
    Phi[k] = kin.Phi;
    Ic[k] = MatX::Zero(6 * cl.bodies.size(), 6 * cl.bodies.size());
    for (size_t b = 0; b < cl.bodies.size(); ++b)
      Ic[k].block<6, 6>(6 * b, 6 * b) = model.body_inertia(cl.bodies[b]).matrix();
    D[k] = model.cluster_ring_gradient(k, model.cluster_q(q, k));
  }

  gamma.reset(m, m, m);
  const auto off = [&](int k) { return model.cluster(k).v_offset; };

  for (int k = Nc - 1; k >= 0; --k) {
    Tensor3 B = b_tensor(Ic[k], Phi[k]);
    Tensor3 F3 = Ic[k] * D[k];
    MatX f4 = Ic[k] * Phi[k];
    int j = k;
    while (j != -1) {
      Tensor3 F1 = B * Phi[j];
      Tensor3 F2 = B.transpose12() * Phi[j];
      int i = j;
      while (i != -1) {
        const Tensor3 A1 = MatX(Phi[i].transpose()) * F1;
        const Tensor3 A2 = (MatX(Phi[i].transpose()) * F2).transpose12();
        const Tensor3 A3 = -A2.transpose13();
        gamma.set_block(off(i), off(j), off(k), A1);
        gamma.set_block(off(i), off(k), off(j), A1.transpose23());
        gamma.set_block(off(j), off(i), off(k), A2);
        gamma.set_block(off(j), off(k), off(i), A2.transpose23());
        gamma.set_block(off(k), off(i), off(j), A3);
        gamma.set_block(off(k), off(j), off(i), A3.transpose23());
        if (i == j) {
          gamma.set_block(off(k), off(i), off(i), A3 + MatX(f4.transpose()) * D[i]);
        }
        if (j == k) {
          gamma.set_block(off(i), off(j), off(j), A1 + MatX(Phi[i].transpose()) * F3);
          F3 = MatX(X[i].transpose()) * F3;
        }
        F1 = MatX(X[i].transpose()) * F1;
        F2 = MatX(X[i].transpose()) * F2;
        i = model.cluster(i).parent;
      }
      B = (MatX(X[j].transpose()) * B) * X[j];
      f4 = X[j].transpose() * f4;
      j = model.cluster(j).parent;
    }
    const int pk = model.cluster(k).parent;
    if (pk != -1) Ic[pk] += X[k].transpose() * Ic[k] * X[k];
  }
}

Tensor3 se3_structure_tensor() {
  Tensor3 s(6, 6, 6);
  for (int j = 0; j < 6; ++j) {
    const Mat6 adj = cross_motion(Vec6::Unit(j));
    for (int k = 0; k < 6; ++k)
      for (int l = 0; l < 6; ++l) s(l, j, k) = adj(l, k);
  }
  return s;
}

}  // namespace corikit
