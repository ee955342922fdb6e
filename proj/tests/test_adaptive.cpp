#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "corikit/adaptive.hpp"
#include "corikit/simkit.hpp"

using namespace corikit;
using testutil::load_model;

TEST_CASE("body regressor linearity") {
  CHECK(body_regressor(Vec6::Zero(), Vec6::Zero(), Vec6::Zero()).isZero(0.0));
  oracles::Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec6 a = rng.vector(6), v = rng.vector(6), w = rng.vector(6);
    const InertialParams theta = oracles::random_params(rng);
    const SpatialInertia I = SpatialInertia::FromParams(theta);

    // inertia-only identity
    const Vec6 lhs0 = body_regressor(a, Vec6::Zero(), Vec6::Zero()) * theta;
    CHECK(testutil::max_abs_diff(lhs0, (I.matrix() * a).eval()) <= 1e-12);

    const Vec6 lhs = body_regressor(a, v, w) * theta;
    const Vec6 rhs = I.matrix() * a + body_coriolis_B(I, v) * w;
    CHECK(testutil::max_abs_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("regressor bundle identities against the dynamics layer") {
  const char* files[] = {"point_mass.json", "arm6.json", "free_spherical_tree.json",
                         "geared_pair.json", "belt_transmission.json"};
  for (const char* f : files) {
    CAPTURE(f);
    const MechanismModel model = load_model(f);
    const VecX theta = model.theta_vector();
    const int m = model.nv();
    oracles::Rng rng(71);
    for (int trial = 0; trial < 15; ++trial) {
      const auto s = oracles::random_state(model, 8000 + trial);
      const VecX vr = rng.vector(m), vrdot = rng.vector(m);
      const auto b = regressor_bundle(model, s.q, s.v, vr, vrdot);

      const auto fact = coriolis_star(model, s.q, s.v);
      const VecX g = gravity_forces(model, s.q);

      CHECK(testutil::rel_err((b.Y * theta).eval(),
                              (fact.H * vrdot + fact.C * vr + g).eval()) <= 1e-10);
      CHECK(testutil::rel_err((b.Yp * theta).eval(), (fact.H * s.v).eval()) <= 1e-10);
      CHECK(testutil::rel_err((b.Yg * theta).eval(), g) <= 1e-10);
      CHECK(testutil::rel_err((b.Yc * theta).eval(),
                              coriolis_transpose_times_v(model, s.q, s.v)) <= 1e-10);
      const double T = kinetic_energy(model, s.q, s.v);
      CHECK(std::abs(b.YT.dot(theta) - T) <= 1e-10 * (1.0 + std::abs(T)));
      const double vdotg = s.v.dot(g);
      CHECK(std::abs(b.YVdot.dot(theta) - vdotg) <= 1e-10 * (1.0 + std::abs(vdotg)));
    }
  }
}

TEST_CASE("regressor bundle edge cases") {
  const MechanismModel arm = load_model("arm6.json");
  const auto s = oracles::random_state(arm, 13);
  const VecX zero = VecX::Zero(arm.nv());
  // zero velocity and zero reference: only gravity columns remain
  const auto b = regressor_bundle(arm, s.q, zero, zero, zero);
  CHECK(testutil::max_abs_diff(b.Y, b.Yg) <= 1e-14);

  // point mass: momentum regressor reduces to m * v in the mass column
  const MechanismModel pm = load_model("point_mass.json");
  const auto sp = oracles::random_state(pm, 14);
  const auto bp = regressor_bundle(pm, sp.q, sp.v, zero.head(3), zero.head(3));
  CHECK(testutil::max_abs_diff(bp.Yp.col(0), sp.v) <= 1e-13);
  for (int c = 4; c < 10; ++c) CHECK(bp.Yp.col(c).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("Y has the ancestor-only block sparsity") {
  const MechanismModel tree = load_model("tree_p0113.json");
  const auto s = oracles::random_state(tree, 15);
  oracles::Rng rng(16);
  const auto b = regressor_bundle(tree, s.q, s.v, rng.vector(4), rng.vector(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double blk = b.Y.block(i, 10 * j, 1, 10).cwiseAbs().maxCoeff();
      if (tree.cluster_ancestor_or_self(i, j))
        CHECK(blk > 0.0);
      else
        CHECK(blk == 0.0);
    }
}

TEST_CASE("direct adaptive step: certainty equivalence and dense agreement") {
  const char* files[] = {"arm6.json", "free_spherical_tree.json", "geared_pair.json",
                         "belt_transmission.json"};
  for (const char* f : files) {
    CAPTURE(f);
    const MechanismModel model = load_model(f);
    const int m = model.nv();
    const VecX theta = model.theta_vector();
    const MatX KD = 2.5 * MatX::Identity(m, m);
    oracles::Rng rng(99);

    // true parameters, on-reference: the law reduces to inverse dynamics
    const auto s = oracles::random_state(model, 17);
    const VecX vdot = rng.vector(m);
    const auto [tau_ce, yts_ce] = direct_adaptive_step(model, s.q, s.v, s.v, vdot, theta, KD);
    CHECK(testutil::rel_err(tau_ce, rnea(model, s.q, s.v, vdot, true)) <= 1e-11);
    CHECK(yts_ce.cwiseAbs().maxCoeff() <= 1e-11);  // s = 0

    for (int trial = 0; trial < 20; ++trial) {
      const auto st = oracles::random_state(model, 2100 + trial);
      const VecX vr = rng.vector(m), vrdot = rng.vector(m);
      VecX theta_hat = theta;
      for (int i = 0; i < theta_hat.size(); ++i) theta_hat[i] *= rng.uniform(0.7, 1.3);

      const auto [tau, yts] = direct_adaptive_step(model, st.q, st.v, vr, vrdot, theta_hat, KD);
      const auto b = regressor_bundle(model, st.q, st.v, vr, vrdot);
      const VecX s_var = st.v - vr;
      CHECK(testutil::rel_err(tau, (b.Y * theta_hat - KD * s_var).eval()) <= 1e-11);
      CHECK(testutil::rel_err(yts, (b.Y.transpose() * s_var).eval()) <= 1e-11);
    }
  }
}

namespace {

std::vector<TrajectorySample> log_to_samples(const MechanismModel& model, const SimLog& log) {
  std::vector<TrajectorySample> out;
  for (Eigen::Index n = 0; n < log.times.size(); ++n) {
    TrajectorySample smp;
    smp.t = log.times[n];
    smp.q = log.q.row(n).transpose();
    smp.v = log.v.row(n).transpose();
    smp.tau = log.tau.row(n).transpose();
    out.push_back(std::move(smp));
  }
  (void)model;
  return out;
}

}  // namespace

TEST_CASE("filtered identification residuals") {
  const MechanismModel pend = load_model("pendulum.json");
  const VecX theta = pend.theta_vector();

  // static hold: v = 0, tau = g; residual stays at zero
  {
    std::vector<TrajectorySample> samples;
    const VecX q = 0.4 * VecX::Ones(1);
    for (int n = 0; n <= 200; ++n) {
      TrajectorySample s;
      s.t = 1e-3 * n;
      s.q = q;
      s.v = VecX::Zero(1);
      s.tau = gravity_forces(pend, q);
      samples.push_back(s);
    }
    const auto res = filtered_identification(pend, samples, 10.0, theta);
    CHECK(res.momentum_residual.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(res.energy_residual.cwiseAbs().maxCoeff() <= 1e-10);
  }

  // free swing: true parameters keep the residual within the integration
  // budget; a perturbed estimate reproduces the filtered-regressor identity
  {
    ControllerConfig ctrl;  // unforced
    SimOptions opt;
    opt.dt = 1e-3;
    opt.t_final = 2.0;
    VecX q0 = 1.2 * VecX::Ones(1), v0 = VecX::Zero(1);
    const SimLog log = simulate(pend, q0, v0, ctrl, opt);
    const auto samples = log_to_samples(pend, log);

    const auto res = filtered_identification(pend, samples, 10.0, theta, true);
    const double scale = 1.0 + gravity_forces(pend, q0).cwiseAbs().maxCoeff();
    CHECK(res.momentum_residual.cwiseAbs().maxCoeff() <= 1e-4 * scale);
    CHECK(res.energy_residual.cwiseAbs().maxCoeff() <= 1e-4 * scale);

    VecX theta_hat = theta * 1.17;
    const auto res2 = filtered_identification(pend, samples, 10.0, theta_hat, false);
    for (Eigen::Index n = 0; n < res.times.size(); n += 50) {
      const VecX predicted =
          res.momentum_residual.row(n).transpose() + res.momentum_regressor[n] * (theta_hat - theta);
      CHECK(testutil::max_abs_diff(res2.momentum_residual.row(n).transpose(), predicted) <= 1e-12);
    }
  }

  // non-uniform sampling is rejected
  {
    std::vector<TrajectorySample> samples(3);
    for (int n = 0; n < 3; ++n) {
      samples[n].t = n * n * 0.1;
      samples[n].q = VecX::Zero(1);
      samples[n].v = VecX::Zero(1);
      samples[n].tau = VecX::Zero(1);
    }
    CHECK_THROWS_AS(filtered_identification(pend, samples, 10.0, theta),
                    std::invalid_argument);
  }
}

TEST_CASE("closed-loop adaptation: Lyapunov rate matches -s^T K_D s") {
  const MechanismModel pend = load_model("pendulum.json");
  const VecX theta = pend.theta_vector();

  ControllerConfig ctrl;
  ctrl.mode = ControllerConfig::Mode::passivity;
  ctrl.reference.lambda = 1.0;
  ctrl.reference.qd = [](double t) { return VecX::Constant(1, 0.8 * std::sin(t)); };
  ctrl.reference.qd_dot = [](double t) { return VecX::Constant(1, 0.8 * std::cos(t)); };
  ctrl.reference.qd_ddot = [](double t) { return VecX::Constant(1, -0.8 * std::sin(t)); };
  ctrl.factorization = FactorizationChoice::TorsionFree();
  ctrl.KD = MatX::Identity(1, 1);
  ctrl.theta_hat0 = 0.85 * theta;
  ctrl.adapt = true;

  SimOptions opt;
  opt.dt = 1e-3;
  opt.t_final = 3.0;
  VecX q0 = VecX::Constant(1, 0.3), v0 = VecX::Zero(1);
  const SimLog log = simulate(pend, q0, v0, ctrl, opt);

  const VecX V = lyapunov_series(pend, log, theta, ctrl.theta_hat0);
  double max_rate_err = 0.0;
  for (Eigen::Index n = 1; n + 1 < V.size(); ++n) {
    const double Vdot_fd = (V[n + 1] - V[n - 1]) / (2.0 * opt.dt);
    const VecX s = log.s.row(n).transpose();
    max_rate_err = std::max(max_rate_err, std::abs(Vdot_fd + s.dot(ctrl.KD * s)));
  }
  CHECK(max_rate_err <= 5e-4);
  // V never increases beyond integration noise
  for (Eigen::Index n = 0; n + 1 < V.size(); ++n) CHECK(V[n + 1] <= V[n] + 1e-9);
}
