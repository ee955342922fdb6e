#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "corikit/christoffel.hpp"

using namespace corikit;
using testutil::load_model;

TEST_CASE("tensor transposes are involutions and products act page-wise") {
  oracles::Rng rng(7);
  Tensor3 t(3, 4, 2);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 3; ++i) t(i, j, k) = rng.uniform(-1, 1);

  CHECK((t.transpose12().transpose12() - t).max_abs() == 0.0);
  CHECK((t.transpose13().transpose13() - t).max_abs() == 0.0);
  CHECK((t.transpose23().transpose23() - t).max_abs() == 0.0);
  CHECK(t.transpose12()(2, 1, 1) == t(1, 2, 1));
  CHECK(t.transpose13()(1, 2, 0) == t(0, 2, 1));
  CHECK(t.transpose23()(2, 1, 3) == t(2, 3, 1));

  const MatX I3 = MatX::Identity(3, 3);
  CHECK(((I3 * t) - t).max_abs() == 0.0);

  // single-page tensor reduces to a matrix product
  Tensor3 one_page(3, 3, 1);
  MatX M(3, 3), A(3, 3), B(3, 3);
  for (int i = 0; i < 9; ++i) {
    M(i / 3, i % 3) = rng.uniform(-1, 1);
    A(i / 3, i % 3) = rng.uniform(-1, 1);
    B(i / 3, i % 3) = rng.uniform(-1, 1);
  }
  one_page.page(0) = M;
  CHECK(testutil::max_abs_diff((A * one_page).page(0), (A * M).eval()) <= 1e-14);
  CHECK(testutil::max_abs_diff((one_page * B).page(0), (M * B).eval()) <= 1e-14);

  // page-slicing associativity: ((A T) B) page p == A * T.page(p) * B
  const Tensor3 atb = (A.replicate(1, 1) * t.block(0, 0, 0, 3, 3, 2)) * B;
  for (int p = 0; p < 2; ++p) {
    CHECK(testutil::max_abs_diff(atb.page(p), (A * t.block(0, 0, 0, 3, 3, 2).page(p) * B).eval()) <=
          1e-14);
  }
  CHECK_THROWS(t * MatX::Identity(3, 3));
}

TEST_CASE("B-tensor identities") {
  oracles::Rng rng(21);
  for (int n : {1, 2}) {
    MatX I = MatX::Zero(6 * n, 6 * n);
    for (int b = 0; b < n; ++b)
      I.block<6, 6>(6 * b, 6 * b) = oracles::random_inertia(rng).matrix();
    MatX V(6 * n, 3), W(6 * n, 2);
    for (int i = 0; i < V.size(); ++i) V(i / 3, i % 3) = rng.uniform(-1, 1);
    for (int i = 0; i < W.size(); ++i) W(i / 2, i % 2) = rng.uniform(-1, 1);

    auto [r1, r2] = b_tensor_identity_residuals(I, V, W);
    CHECK(r1 <= 1e-12);
    CHECK(r2 <= 1e-12);

    // W = 0: both sides vanish
    auto [z1, z2] = b_tensor_identity_residuals(I, V, MatX::Zero(6 * n, 2));
    CHECK(z1 == 0.0);
    CHECK(z2 == 0.0);

    // V == W
    auto [s1, s2] = b_tensor_identity_residuals(I, V, V);
    CHECK(s1 <= 1e-12);
    CHECK(s2 <= 1e-12);
  }
}

TEST_CASE("christoffel_sweep: Euclidean point mass vanishes") {
  const MechanismModel pm = load_model("point_mass.json");
  const auto s = oracles::random_state(pm, 3);
  CHECK(christoffel_sweep(pm, s.q).max_abs() <= 1e-15);
}

TEST_CASE("planar 2R symbols match the closed form and the fd oracle") {
  const MechanismModel m = load_model("planar_2r.json");
  oracles::Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    VecX q(2);
    q << rng.uniform(-M_PI, M_PI), rng.uniform(-M_PI, M_PI);
    const Tensor3 sweep = christoffel_sweep(m, q);
    const Tensor3 fast = christoffel_fast(m, q);
    const Tensor3 fd = oracles::fd_christoffel_coordinates(m, q, 1e-6);

    // closed form for two uniform rods: hbar = m2 c2 l1 sin(q2)
    const double hbar = 1.0 * 0.5 * 1.0 * std::sin(q[1]);
    Tensor3 expected(2, 2, 2);
    expected(0, 0, 1) = -hbar;
    expected(0, 1, 0) = -hbar;
    expected(0, 1, 1) = -hbar;
    expected(1, 0, 0) = hbar;

    CHECK((sweep - expected).max_abs() <= 1e-10);
    CHECK((fast - expected).max_abs() <= 1e-10);
    CHECK((fd - expected).max_abs() <= 1e-5);
  }
}

TEST_CASE("fast algorithm equals the unit-velocity sweep on every bundled model") {
  const char* files[] = {"point_mass.json", "pendulum.json",      "planar_2r.json",
                         "arm6.json",       "tree_p0113.json",    "free_spherical_tree.json",
                         "geared_pair.json", "belt_transmission.json"};
  for (const char* f : files) {
    CAPTURE(f);
    const MechanismModel model = load_model(f);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = oracles::random_state(model, 4000 + trial);
      const Tensor3 sweep = christoffel_sweep(model, s.q);
      const Tensor3 fast = christoffel_fast(model, s.q);
      CHECK((fast - sweep).max_abs() <= 1e-11);
    }
  }
}

TEST_CASE("fast algorithm handles subtrees attached inside a cluster") {
  MechanismModel ext;
  const MechanismModel base = load_model("geared_pair.json");
  ext.set_gravity(base.gravity());
  for (int b = 0; b < base.num_bodies(); ++b) ext.add_body(base.body(b));
  BodySpec tip;
  tip.name = "tip";
  tip.parent = base.body_index("rotor");
  tip.joint.kind = JointKind::spherical;
  tip.joint.set_offset(Vec3(0.0, 0.1, 0.05), Vec3(0.2, 0, 0));
  oracles::Rng rng(61);
  tip.theta = oracles::random_params(rng);
  ext.add_body(tip);
  ext.couple_geared_pair("link", "rotor", 2.0);
  ext.finalize();

  for (int trial = 0; trial < 10; ++trial) {
    const auto s = oracles::random_state(ext, 6300 + trial);
    CHECK((christoffel_fast(ext, s.q) - christoffel_sweep(ext, s.q)).max_abs() <= 1e-11);
  }
}

TEST_CASE("coordinate models: fd oracle agreement and (2,3) symmetry") {
  for (const char* f : {"planar_2r.json", "arm6.json", "tree_p0113.json"}) {
    CAPTURE(f);
    const MechanismModel model = load_model(f);
    for (int trial = 0; trial < 5; ++trial) {
      const auto s = oracles::random_state(model, 4400 + trial);
      const Tensor3 sweep = christoffel_sweep(model, s.q);
      const Tensor3 fast = christoffel_fast(model, s.q);
      const Tensor3 fd = oracles::fd_christoffel_coordinates(model, s.q, 1e-6);
      CHECK((sweep - fd).max_abs() <= 1e-5);
      CHECK((fast - fd).max_abs() <= 1e-5);
      CHECK((sweep - sweep.transpose23()).max_abs() <= 1e-12);
      // fd oracle is symmetric in (2,3) by construction
      CHECK((fd - fd.transpose23()).max_abs() <= 1e-12);
    }
  }
}

TEST_CASE("free rigid body: antisymmetric part equals the structure constants") {
  MechanismModel m;
  BodySpec b;
  b.name = "body";
  b.joint.kind = JointKind::free_joint;
  oracles::Rng rng(5);
  b.theta = oracles::random_params(rng);
  m.add_body(b);
  m.finalize();

  const auto s = oracles::random_state(m, 6);
  const Tensor3 gamma = christoffel_sweep(m, s.q);
  CHECK((christoffel_fast(m, s.q) - gamma).max_abs() <= 1e-12);

  const Tensor3 anti = gamma - gamma.transpose23();
  const Tensor3 s_lower = MatX(m.body_inertia(0).matrix()) * se3_structure_tensor();
  CHECK((anti - s_lower).max_abs() <= 1e-10);
}

TEST_CASE("symbol-level pairing: the metric rate contracts through the middle index") {
  // Metric compatibility: dH_ij along e_k == Gamma_ikj + Gamma_jki. For
  // coordinate models the symbols are (2,3)-symmetric and this coincides
  // with pairing over the last index.
  for (const char* f : {"arm6.json", "free_spherical_tree.json", "geared_pair.json"}) {
    CAPTURE(f);
    const MechanismModel model = load_model(f);
    const int mm = model.nv();
    const auto s = oracles::random_state(model, 4900);
    const Tensor3 gamma = christoffel_sweep(model, s.q);
    for (int k = 0; k < mm; ++k) {
      const MatX Hdot_k =
          oracles::fd_mass_matrix_rate(model, s.q, VecX::Unit(mm, k), 1e-6);
      const MatX Ck = gamma.contract_cols(VecX::Unit(mm, k));  // Ck(i,j) = Gamma_ikj
      const MatX paired = Ck + Ck.transpose();
      CHECK(testutil::max_abs_diff(paired, Hdot_k) <= 1e-4 * (1.0 + Hdot_k.cwiseAbs().maxCoeff()));
      if (model.is_coordinate_model()) {
        const MatX page_paired = gamma.page(k) + gamma.page(k).transpose();
        CHECK(testutil::max_abs_diff(page_paired, Hdot_k) <=
              1e-4 * (1.0 + Hdot_k.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("contraction recovers the Coriolis matrix") {
  for (const char* f : {"arm6.json", "free_spherical_tree.json", "belt_transmission.json"}) {
    CAPTURE(f);
    const MechanismModel model = load_model(f);
    const auto s = oracles::random_state(model, 5500);
    const Tensor3 gamma = christoffel_sweep(model, s.q);
    const MatX C = coriolis_star(model, s.q, s.v).C;
    // sum_j Gamma(i,j,k) v_j == C(i,k)
    const MatX contracted = gamma.contract_cols(s.v);
    CHECK(testutil::max_abs_diff(contracted, C) <= 1e-12);
  }
}

TEST_CASE("zero-inertia model yields zero symbols") {
  MechanismModel m;
  BodySpec b;
  b.name = "ghost";
  b.joint.kind = JointKind::revolute;
  b.joint.axis = Vec3::UnitZ();
  b.theta.setZero();
  m.add_body(b);
  m.finalize();
  const auto s = oracles::random_state(m, 1);
  CHECK(christoffel_fast(m, s.q).max_abs() == 0.0);
  CHECK(christoffel_sweep(m, s.q).max_abs() == 0.0);
}

TEST_CASE("custom cluster without a ring gradient is rejected by the fast path") {
  MechanismModel m;
  BodySpec b;
  b.name = "link";
  b.joint.kind = JointKind::revolute;
  b.joint.axis = Vec3::UnitZ();
  b.theta << 1, 0.1, 0, 0, 0.01, 0.05, 0.05, 0, 0, 0;
  m.add_body(b);
  auto hooks = std::make_shared<CustomClusterHooks>();
  hooks->n_bodies = 1;
  hooks->nv = 1;
  hooks->nq = 1;
  JointSpec spec;
  spec.kind = JointKind::revolute;
  spec.axis = Vec3::UnitZ();
  hooks->x_attach = [spec](const VecX& q) {
    return std::vector<SpatialTransform>{joint_transform(spec, q)};
  };
  hooks->phi = [spec](const VecX& q) { return joint_motion_subspace(spec, q); };
  // no ring_gradient on purpose
  m.add_custom_cluster({"link"}, hooks);
  m.finalize();
  const auto s = oracles::random_state(m, 1);
  CHECK(coriolis_star(m, s.q, s.v).C.allFinite());  // recursion is fine
  CHECK_THROWS_AS(christoffel_fast(m, s.q), ModelError);
  CHECK((christoffel_sweep(m, s.q)).max_abs() >= 0.0);  // sweep path unaffected
}
