#include "corikit/oracles.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace corikit::oracles {

std::uint64_t Rng::next() {
  // splitmix64; stable across platforms, unlike std distributions
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
  const double u1 = std::max(uniform(), 1e-300);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 Rng::unit_vector() {
  Vec3 v(gaussian(), gaussian(), gaussian());
  const double n = v.norm();
  return n > 1e-12 ? Vec3(v / n) : Vec3::UnitZ();
}

VecX Rng::vector(int n, double lo, double hi) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

SpatialInertia random_inertia(Rng& rng) {
  return SpatialInertia::FromParams(random_params(rng));
}

InertialParams random_params(Rng& rng) {
  // Pseudo-inertia J = L L^T with a mass floor keeps the body realizable.
  Eigen::Matrix4d L;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) L(i, j) = 0.4 * rng.gaussian();
  Eigen::Matrix4d J = L * L.transpose();
  J(3, 3) += 0.5 + rng.uniform();
  const Mat3 sigma = J.topLeftCorner<3, 3>();
  const Mat3 Ibar = sigma.trace() * Mat3::Identity() - sigma;
  return SpatialInertia(J(3, 3), J.topRightCorner<3, 1>(), Ibar).params();
}

State random_state(const MechanismModel& model, std::uint64_t seed) {
  Rng rng(seed);
  State s;
  s.q = model.neutral_config();
  s.v = rng.vector(model.nv());
  // Wander away from neutral along a few random flows; keeps quaternion
  // blocks on their manifold.
  for (int it = 0; it < 3; ++it)
    s.q = model.integrate_config(s.q, rng.vector(model.nv(), -1.5, 1.5), 1.0);
  return s;
}

namespace {

BodySpec make_body(Rng& rng, const std::string& name, int parent, JointKind kind) {
  BodySpec b;
  b.name = name;
  b.parent = parent;
  b.joint.kind = kind;
  b.joint.axis = rng.unit_vector();
  if (kind == JointKind::helical) b.joint.pitch = rng.uniform(-0.2, 0.2);
  b.joint.set_offset(Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.1, 0.4)),
                     Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)));
  b.theta = random_params(rng);
  return b;
}

}  // namespace

MechanismModel random_open_chain(int n_bodies, std::uint64_t seed, bool coordinate_joints_only) {
  Rng rng(seed);
  MechanismModel model;
  model.set_name("random_chain");
  for (int i = 0; i < n_bodies; ++i) {
    JointKind kind;
    const double pick = rng.uniform();
    if (coordinate_joints_only) {
      kind = pick < 0.5 ? JointKind::revolute
                        : (pick < 0.8 ? JointKind::prismatic : JointKind::helical);
    } else {
      kind = pick < 0.4 ? JointKind::revolute
                        : (pick < 0.6 ? JointKind::prismatic
                                      : (pick < 0.85 ? JointKind::spherical : JointKind::helical));
    }
    model.add_body(make_body(rng, "link" + std::to_string(i), i - 1, kind));
  }
  model.finalize();
  return model;
}

MechanismModel balanced_revolute_tree(int n_bodies, std::uint64_t seed) {
  Rng rng(seed);
  MechanismModel model;
  model.set_name("balanced_tree");
  for (int i = 0; i < n_bodies; ++i)
    model.add_body(
        make_body(rng, "node" + std::to_string(i), i == 0 ? -1 : (i - 1) / 2, JointKind::revolute));
  model.finalize();
  return model;
}

double skew_check(const MatX& M) {
  return (M + M.transpose()).cwiseAbs().maxCoeff();
}

MatX fd_mass_matrix_rate(const MechanismModel& model, const VecX& q, const VecX& v, double h) {
  if (h <= 0.0) throw std::invalid_argument("fd step must be positive");
  const VecX qp = model.integrate_config(q, v, h);
  const VecX qm = model.integrate_config(q, v, -h);
  return (mass_matrix(model, qp) - mass_matrix(model, qm)) / (2.0 * h);
}

MatX fd_mass_matrix_rate_richardson(const MechanismModel& model, const VecX& q, const VecX& v,
                                    double h) {
  const MatX full = fd_mass_matrix_rate(model, q, v, h);
  const MatX half = fd_mass_matrix_rate(model, q, v, 0.5 * h);
  return (4.0 * half - full) / 3.0;
}

Tensor3 fd_christoffel_coordinates(const MechanismModel& model, const VecX& q, double h) {
  if (!model.is_coordinate_model())
    throw std::invalid_argument("coordinate Christoffel oracle needs coordinate joints only");
  const int m = model.nv();
  // dH[k] = dH/dq^k by central differences
  std::vector<MatX> dH(m);
  for (int k = 0; k < m; ++k) {
    VecX qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    dH[k] = (mass_matrix(model, qp) - mass_matrix(model, qm)) / (2.0 * h);
  }
  Tensor3 gamma(m, m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        gamma(i, j, k) = 0.5 * (dH[k](i, j) + dH[j](i, k) - dH[i](j, k));
  return gamma;
}

MatX three_form_skew(int m, const VecX& v, const std::vector<std::array<int, 3>>& triples,
                     const VecX& betas) {
  if (static_cast<int>(triples.size()) != betas.size())
    throw std::invalid_argument("one beta per triple required");
  MatX S = MatX::Zero(m, m);
  for (size_t t = 0; t < triples.size(); ++t) {
    MatX P = MatX::Zero(3, m);
    P(0, triples[t][0]) = 1.0;
    P(1, triples[t][1]) = 1.0;
    P(2, triples[t][2]) = 1.0;
    S += betas[t] * P.transpose() * skew(P * v) * P;
  }
  return S;
}

}  // namespace corikit::oracles
