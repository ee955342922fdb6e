#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "corikit/adaptive.hpp"
#include "corikit/benchkit.hpp"
#include "corikit/christoffel.hpp"
#include "corikit/csv.hpp"
#include "corikit/dynamics.hpp"
#include "corikit/oracles.hpp"
#include "corikit/simkit.hpp"

namespace corikit::cli {

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;

int thread_cap() {
  const char* env = std::getenv("CORIOLIS_KIT_THREADS");
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  if (!env) return hw;
  const int cap = std::atoi(env);
  return cap > 0 ? std::min(cap, hw) : 1;
}

struct StateArgs {
  std::string state_file;
  bool random = false;
  std::uint64_t seed = 0;
};

void add_format_flag(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "output format (csv only)")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv"}));
}

void add_state_flags(CLI::App* cmd, StateArgs& args) {
  cmd->add_option("--state", args.state_file,
                  "state JSON file {\"q\":[...],\"v\":[...]} or the literal 'zero'");
  cmd->add_flag("--random", args.random, "draw a random state from --seed");
  cmd->add_option("--seed", args.seed, "seed for --random")->capture_default_str();
}

struct LoadedState {
  VecX q, v, vr, vrdot;
};

LoadedState resolve_state(const MechanismModel& model, const StateArgs& args) {
  LoadedState out;
  out.vr = VecX::Zero(model.nv());
  out.vrdot = VecX::Zero(model.nv());
  if (args.random) {
    const auto s = oracles::random_state(model, args.seed);
    out.q = s.q;
    out.v = s.v;
    return out;
  }
  if (args.state_file.empty() || args.state_file == "zero") {
    out.q = model.neutral_config();
    out.v = VecX::Zero(model.nv());
    return out;
  }
  std::ifstream in(args.state_file);
  if (!in) throw ModelError("cannot open state file '" + args.state_file + "'");
  nlohmann::json j;
  in >> j;
  auto read_vec = [&](const char* key, int expected) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != expected)
      throw ModelError(std::string("state field '") + key + "' has the wrong length");
    VecX v(expected);
    for (int i = 0; i < expected; ++i) v[i] = arr[i].get<double>();
    return v;
  };
  out.q = read_vec("q", model.nq());
  out.v = read_vec("v", model.nv());
  if (j.contains("vr")) out.vr = read_vec("vr", model.nv());
  if (j.contains("vrdot")) out.vrdot = read_vec("vrdot", model.nv());
  model.validate_config(out.q);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
  return out;
}

int cmd_coriolis(const std::string& model_path, const StateArgs& st, const std::string& out_path) {
  const MechanismModel model = MechanismModel::load(model_path);
  const LoadedState s = resolve_state(model, st);
  const auto fact = coriolis_star(model, s.q, s.v);
  std::ofstream out = open_out(out_path);
  out << "# joint-space inertia H and torsion-free Coriolis matrix C (SI units)\n";
  out << "# columns: matrix tag, row index, then " << model.nv() << " entries\n";
  csv::write_matrix(out, "H", fact.H);
  csv::write_matrix(out, "C", fact.C);
  std::cout << "wrote H (" << fact.H.rows() << "x" << fact.H.cols() << ") and C to " << out_path
            << "\n";
  return kOk;
}

int cmd_christoffel(const std::string& model_path, const StateArgs& st,
                    const std::string& method, const std::string& out_path) {
  const MechanismModel model = MechanismModel::load(model_path);
  const LoadedState s = resolve_state(model, st);
  const Tensor3 gamma =
      (method == "sweep") ? christoffel_sweep(model, s.q) : christoffel_fast(model, s.q);
  std::ofstream out = open_out(out_path);
  const int m = model.nv();
  out << "# generalized Christoffel symbols Gamma[i][j][k]: rows i, columns j, pages k\n";
  out << "# each CSV row: page k, row i, entries Gamma(i, 0..m-1, k); m = " << m << "\n";
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      out << k << ',' << i;
      for (int j = 0; j < m; ++j) out << ',' << csv::num(gamma(i, j, k));
      out << '\n';
    }
  std::cout << "wrote " << m << " pages of " << m << "x" << m << " symbols (" << method
            << ") to " << out_path << "\n";
  return kOk;
}

int cmd_regressors(const std::string& model_path, const StateArgs& st,
                   const std::string& out_path) {
  const MechanismModel model = MechanismModel::load(model_path);
  const LoadedState s = resolve_state(model, st);
  const auto b = regressor_bundle(model, s.q, s.v, s.vr, s.vrdot);
  std::ofstream out = open_out(out_path);
  out << "# regressors over theta (10 params per body, body order)\n";
  out << "# columns: matrix tag, row index, then " << 10 * model.num_bodies() << " entries\n";
  csv::write_matrix(out, "Y", b.Y);
  csv::write_matrix(out, "Yp", b.Yp);
  csv::write_matrix(out, "Yg", b.Yg);
  csv::write_matrix(out, "Yc", b.Yc);
  csv::write_matrix(out, "YT", b.YT);
  csv::write_matrix(out, "YVdot", b.YVdot);
  std::cout << "wrote six regressors to " << out_path << "\n";
  return kOk;
}

int cmd_identify(const std::string& model_path, const std::string& traj_path, double lambda,
                 double theta_scale, const std::string& out_path) {
  const MechanismModel model = MechanismModel::load(model_path);
  const csv::Table traj = csv::read_table(traj_path);
  const int tcol = traj.column("t");
  const auto qcols = traj.columns_with_prefix("q");
  const auto vcols = traj.columns_with_prefix("v");
  const auto taucols = traj.columns_with_prefix("tau");
  if (tcol < 0 || static_cast<int>(qcols.size()) != model.nq() ||
      static_cast<int>(vcols.size()) != model.nv() ||
      static_cast<int>(taucols.size()) != model.nv())
    throw ModelError("trajectory CSV must carry t, q*, v*, tau* columns matching the model");

  std::vector<TrajectorySample> samples(traj.data.rows());
  for (Eigen::Index n = 0; n < traj.data.rows(); ++n) {
    samples[n].t = traj.data(n, tcol);
    samples[n].q.resize(model.nq());
    samples[n].v.resize(model.nv());
    samples[n].tau.resize(model.nv());
    for (int i = 0; i < model.nq(); ++i) samples[n].q[i] = traj.data(n, qcols[i]);
    for (int i = 0; i < model.nv(); ++i) samples[n].v[i] = traj.data(n, vcols[i]);
    for (int i = 0; i < model.nv(); ++i) samples[n].tau[i] = traj.data(n, taucols[i]);
  }

  const VecX theta = theta_scale * model.theta_vector();
  const auto res = filtered_identification(model, samples, lambda, theta);

  std::vector<std::string> cols = {"t"};
  for (int i = 0; i < model.nv(); ++i) cols.push_back("e" + std::to_string(i));
  cols.push_back("e_energy");
  MatX data(res.times.size(), model.nv() + 2);
  data.col(0) = res.times;
  data.middleCols(1, model.nv()) = res.momentum_residual;
  data.col(model.nv() + 1) = res.energy_residual;
  csv::write_table(out_path, cols, data,
                   "filtered momentum/energy identification residuals, lambda = " +
                       std::to_string(lambda));
  std::cout << "max |momentum residual| = " << res.momentum_residual.cwiseAbs().maxCoeff()
            << ", max |energy residual| = " << res.energy_residual.cwiseAbs().maxCoeff() << "\n";
  return kOk;
}

struct SimulateArgs {
  std::string model_path, controller = "passivity", factorization = "star", out_path;
  double lambda = 1.0, kd = 1.0, theta_scale = 1.0, dt = 1e-3, t_final = 20.0;
  bool adapt = false, hold = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const MechanismModel model = MechanismModel::load(a.model_path);
  const int m = model.nv();

  ControllerConfig ctrl;
  SimOptions opt;
  opt.dt = a.dt;
  opt.t_final = a.t_final;

  VecX q0 = model.neutral_config();
  VecX v0 = VecX::Zero(m);

  if (a.controller == "none") {
    ctrl.mode = ControllerConfig::Mode::none;
    v0 = 0.3 * VecX::Ones(m);  // a gentle kick so unforced runs move
  } else {
    if (!model.is_coordinate_model())
      throw ModelError("the built-in tracking reference needs a coordinate model");
    ctrl.mode = ControllerConfig::Mode::passivity;
    ctrl.reference.lambda = a.lambda;
    const VecX qn = model.neutral_config();
    ctrl.reference.qd = [qn](double t) {
      VecX q = qn;
      q[0] += t + std::sin(t);
      return q;
    };
    ctrl.reference.qd_dot = [m](double t) {
      VecX v = VecX::Zero(m);
      v[0] = 1.0 + std::cos(t);
      return v;
    };
    ctrl.reference.qd_ddot = [m](double t) {
      VecX v = VecX::Zero(m);
      v[0] = -std::sin(t);
      return v;
    };
    ctrl.KD = a.kd * MatX::Identity(m, m);
    ctrl.theta_hat0 = a.theta_scale * model.theta_vector();
    ctrl.adapt = a.adapt;
    ctrl.per_stage = !a.hold;
    if (a.factorization == "star") {
      ctrl.factorization = FactorizationChoice::TorsionFree();
    } else if (a.factorization.rfind("beta=", 0) == 0) {
      ctrl.factorization = FactorizationChoice::Beta(std::stod(a.factorization.substr(5)));
    } else {
      throw CLI::ValidationError("--factorization", "must be 'star' or 'beta=<value>'");
    }
    if (model.name() == "point_mass") point_mass_initial_state(q0, v0);
  }

  const SimLog log = simulate(model, q0, v0, ctrl, opt);
  const VecX V = lyapunov_series(model, log, model.theta_vector(),
                                 ctrl.mode == ControllerConfig::Mode::passivity
                                     ? ctrl.theta_hat0
                                     : model.theta_vector());

  std::vector<std::string> cols = {"t"};
  for (int i = 0; i < model.nq(); ++i) cols.push_back("q" + std::to_string(i));
  for (int i = 0; i < m; ++i) cols.push_back("v" + std::to_string(i));
  for (int i = 0; i < m; ++i) cols.push_back("s" + std::to_string(i));
  for (int i = 0; i < m; ++i) cols.push_back("tau" + std::to_string(i));
  cols.push_back("V");
  const Eigen::Index T = log.times.size();
  MatX data(T, 1 + model.nq() + 3 * m + 1);
  data.col(0) = log.times;
  data.middleCols(1, model.nq()) = log.q;
  data.middleCols(1 + model.nq(), m) = log.v;
  data.middleCols(1 + model.nq() + m, m) = log.s;
  data.middleCols(1 + model.nq() + 2 * m, m) = log.tau;
  data.col(1 + model.nq() + 3 * m) = V;
  csv::write_table(a.out_path, cols, data,
                   "closed-loop log: factorization=" + log.factorization_tag +
                       " dt=" + std::to_string(a.dt) + " (rad, m, s, N, N*m)");
  std::cout << "simulated " << a.t_final << " s (" << T << " samples), wrote " << a.out_path
            << "\n";
  return kOk;
}

int cmd_bench(const std::string& family, const std::string& sizes_str, int reps,
              std::uint64_t seed, const std::string& out_path) {
  std::vector<int> sizes;
  std::stringstream ss(sizes_str);
  std::string tok;
  while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
  if (sizes.empty()) throw CLI::ValidationError("--sizes", "must list at least one size");

  const auto rows = run_scaling_bench(family, sizes, reps, seed);
  const std::string table = bench_table_csv(rows);
  if (!out_path.empty()) open_out(out_path) << table;
  std::cout << table;

  if (rows.size() >= 2) {
    std::vector<double> nd, t_alg;
    for (const auto& r : rows) {
      nd.push_back(static_cast<double>(r.n_bodies) * r.depth);
      t_alg.push_back(r.t_coriolis_us);
    }
    const auto [slope, r2] = loglog_fit(nd, t_alg);
    std::cout << "coriolis fit vs N*d: slope " << slope << ", R^2 " << r2 << "\n";
    std::cout << "christoffel sweep/fast ratio: " << rows.front().t_sweep_us / rows.front().t_fast_us
              << " -> " << rows.back().t_sweep_us / rows.back().t_fast_us << "\n";
  }
  return kOk;
}

struct ResidualRow {
  std::string name;
  double residual;
  double tolerance;
};

int cmd_validate(const std::string& model_path, std::uint64_t seed, int n_states) {
  const MechanismModel model = MechanismModel::load(model_path);
  const int m = model.nv();

  struct Acc {
    double skew = 0, dyn = 0, ctv = 0, mass = 0, regr = 0, proj = 0;
  };
  const int threads = std::max(1, std::min(thread_cap(), n_states));
  std::vector<Acc> per_thread(threads);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i; (i = next.fetch_add(1)) < n_states;) {
        Acc& acc = per_thread[t];
        // per-state seeding keeps the printed residuals independent of the
        // thread schedule
        oracles::Rng rng(seed + 9000 + i);
        const auto s = oracles::random_state(model, seed + 1000 + i);
        const auto fact = coriolis_star(model, s.q, s.v);

        const MatX Hdot = oracles::fd_mass_matrix_rate(model, s.q, s.v, 1e-6);
        acc.skew = std::max(acc.skew, (Hdot - fact.C - fact.C.transpose()).cwiseAbs().maxCoeff() /
                                          (1.0 + Hdot.cwiseAbs().maxCoeff()));

        const VecX bias = rnea(model, s.q, s.v, VecX::Zero(m), false);
        acc.dyn = std::max(acc.dyn, (fact.C * s.v - bias).cwiseAbs().maxCoeff() /
                                        (1.0 + bias.cwiseAbs().maxCoeff()));

        const VecX ctv = coriolis_transpose_times_v(model, s.q, s.v);
        acc.ctv = std::max(acc.ctv, (fact.C.transpose() * s.v - ctv).cwiseAbs().maxCoeff() /
                                        (1.0 + ctv.cwiseAbs().maxCoeff()));

        const auto [A, Adot] = stacked_jacobians(model, s.q, s.v);
        acc.mass = std::max(acc.mass,
                            (A.transpose() * maximal_blockdiag_H(model) * A - fact.H)
                                    .cwiseAbs()
                                    .maxCoeff() /
                                (1.0 + fact.H.cwiseAbs().maxCoeff()));

        const auto cache = forward_kinematics(model, s.q, s.v);
        const auto [Hbar, Cbar] = project_factorization(maximal_blockdiag_C(model, cache),
                                                        maximal_blockdiag_H(model), A, Adot);
        acc.proj = std::max(acc.proj, (Cbar - fact.C).cwiseAbs().maxCoeff());

        const VecX vr = rng.vector(m), vrdot = rng.vector(m);
        const auto b = regressor_bundle(model, s.q, s.v, vr, vrdot);
        const VecX theta = model.theta_vector();
        const VecX g = gravity_forces(model, s.q);
        double r = (b.Y * theta - fact.H * vrdot - fact.C * vr - g).cwiseAbs().maxCoeff();
        r = std::max(r, (b.Yp * theta - fact.H * s.v).cwiseAbs().maxCoeff());
        r = std::max(r, (b.Yg * theta - g).cwiseAbs().maxCoeff());
        r = std::max(r, (b.Yc * theta - ctv).cwiseAbs().maxCoeff());
        r = std::max(r, std::abs(b.YT.dot(theta) - kinetic_energy(model, s.q, s.v)));
        r = std::max(r, std::abs(b.YVdot.dot(theta) - s.v.dot(g)));
        const double scale = 1.0 + g.cwiseAbs().maxCoeff() + bias.cwiseAbs().maxCoeff();
        acc.regr = std::max(acc.regr, r / scale);
      }
    });
  }
  for (auto& th : pool) th.join();

  Acc total;
  for (const auto& acc : per_thread) {
    total.skew = std::max(total.skew, acc.skew);
    total.dyn = std::max(total.dyn, acc.dyn);
    total.ctv = std::max(total.ctv, acc.ctv);
    total.mass = std::max(total.mass, acc.mass);
    total.proj = std::max(total.proj, acc.proj);
    total.regr = std::max(total.regr, acc.regr);
  }

  // Christoffel cross-check on a handful of states (cubic output)
  double chris = 0.0;
  for (int i = 0; i < std::min(n_states, 10); ++i) {
    const auto s = oracles::random_state(model, seed + 31 * i);
    chris = std::max(chris,
                     (christoffel_fast(model, s.q) - christoffel_sweep(model, s.q)).max_abs());
  }

  const std::vector<ResidualRow> rows = {
      {"skew (Hdot - C - C^T, relative)", total.skew, 1e-4},
      {"dynamics (C v vs bias, relative)", total.dyn, 1e-10},
      {"C^T v cross-method (relative)", total.ctv, 1e-11},
      {"mass matrix dual route (relative)", total.mass, 1e-12},
      {"projection vs recursion (abs)", total.proj, 1e-11},
      {"christoffel fast vs sweep (abs)", chris, 1e-11},
      {"regressor identities (relative)", total.regr, 1e-10},
  };
  bool ok = true;
  for (const auto& r : rows) {
    const bool pass = r.residual <= r.tolerance;
    ok = ok && pass;
    std::printf("%-38s %10.3e  (tol %7.1e)  %s\n", r.name.c_str(), r.residual, r.tolerance,
                pass ? "PASS" : "FAIL");
  }
  return ok ? kOk : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{
      "corikit: Coriolis factorizations, generalized Christoffel symbols, and\n"
      "passivity-based control computations for open- and closed-chain mechanisms"};
  app.require_subcommand(1);

  std::string model_path, out_path = "out.csv", method = "fast", format = "csv";
  StateArgs st;

  auto* coriolis = app.add_subcommand(
      "coriolis", "Emit the mass matrix H and torsion-free Coriolis matrix C at a state.\n"
                  "Example: corikit coriolis --model models/point_mass.json --state zero "
                  "--out C.csv");
  coriolis->add_option("--model", model_path, "model JSON file")->required();
  add_state_flags(coriolis, st);
  coriolis->add_option("--out", out_path, "output CSV path")->capture_default_str();
  add_format_flag(coriolis, format);

  auto* christoffel = app.add_subcommand(
      "christoffel", "Emit the generalized Christoffel symbol tensor as CSV pages.\n"
                     "Example: corikit christoffel --model models/arm6.json --random --seed 7 "
                     "--out gamma.csv");
  christoffel->add_option("--model", model_path, "model JSON file")->required();
  add_state_flags(christoffel, st);
  christoffel->add_option("--method", method, "fast (tensor recursion) or sweep")->capture_default_str()
      ->check(CLI::IsMember({"fast", "sweep"}));
  christoffel->add_option("--out", out_path, "output CSV path")->capture_default_str();
  add_format_flag(christoffel, format);

  auto* regress = app.add_subcommand(
      "regressors", "Emit the six adaptive-control regressors at a state.\n"
                    "Example: corikit regressors --model models/arm6.json --random --seed 3 "
                    "--out Y.csv");
  regress->add_option("--model", model_path, "model JSON file")->required();
  add_state_flags(regress, st);
  regress->add_option("--out", out_path, "output CSV path")->capture_default_str();
  add_format_flag(regress, format);

  double lambda = 10.0, theta_scale = 1.0;
  std::string traj_path;
  auto* identify = app.add_subcommand(
      "identify", "Run the filtered momentum/energy identification over a trajectory CSV.\n"
                  "Example: corikit identify --model models/pendulum.json --traj run.csv "
                  "--lambda 10 --out resid.csv");
  identify->add_option("--model", model_path, "model JSON file")->required();
  identify->add_option("--traj", traj_path, "trajectory CSV (t, q*, v*, tau* columns)")
      ->required();
  identify->add_option("--lambda", lambda, "filter pole (rad/s)")->capture_default_str();
  identify->add_option("--theta-scale", theta_scale,
                       "scale on the model parameters used in the residual")->capture_default_str();
  identify->add_option("--out", out_path, "output CSV path")->capture_default_str();
  add_format_flag(identify, format);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Fixed-step RK4 closed-loop run with the passivity-based tracking law.\n"
                  "Example: corikit simulate --model models/point_mass.json --factorization "
                  "beta=-5 --tfinal 20 --out run.csv");
  simulate_cmd->add_option("--model", sim.model_path, "model JSON file")->required();
  simulate_cmd->add_option("--controller", sim.controller, "passivity | none")->capture_default_str()
      ->check(CLI::IsMember({"passivity", "none"}));
  simulate_cmd->add_option("--factorization", sim.factorization,
                           "star | beta=<value> (Coriolis choice in the law)")->capture_default_str();
  simulate_cmd->add_option("--lambda", sim.lambda, "sliding-variable gain")->capture_default_str();
  simulate_cmd->add_option("--kd", sim.kd, "damping gain (scalar, times identity)")->capture_default_str();
  simulate_cmd->add_option("--theta-hat-scale", sim.theta_scale,
                           "initial parameter estimates as a scale on the true values")->capture_default_str();
  simulate_cmd->add_option("--dt", sim.dt, "integration step (s)")->capture_default_str();
  simulate_cmd->add_option("--tfinal", sim.t_final, "horizon (s)")->capture_default_str();
  simulate_cmd->add_flag("--adapt", sim.adapt, "enable the adaptation law");
  simulate_cmd->add_flag("--hold", sim.hold, "hold the controller over RK stages (zero-order)");
  simulate_cmd->add_option("--out", sim.out_path, "output CSV path")->required();
  add_format_flag(simulate_cmd, format);

  std::string family = "btree", sizes = "32,64,128,256";
  int reps = 11, n_states = 50;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand(
      "bench", "Time the Coriolis and Christoffel algorithms over generated trees.\n"
               "Example: corikit bench --family chain --sizes 8,16,32,64 --out scaling.csv");
  bench->add_option("--family", family, "chain | btree")->capture_default_str()
      ->check(CLI::IsMember({"chain", "btree"}));
  bench->add_option("--sizes", sizes, "comma-separated body counts")->capture_default_str();
  bench->add_option("--reps", reps, "timing repetitions per size")->capture_default_str();
  bench->add_option("--seed", bench_seed, "tree generation seed")->capture_default_str();
  bench->add_option("--out", out_path, "also write the table to this CSV");

  std::uint64_t val_seed = 1;
  auto* validate = app.add_subcommand(
      "validate", "Run the oracle residual suite on a model; exit 1 on any failure.\n"
                  "Example: corikit validate --model models/arm6.json --seed 1 --states 50");
  validate->add_option("--model", model_path, "model JSON file")->required();
  validate->add_option("--seed", val_seed, "state generation seed")->capture_default_str();
  validate->add_option("--states", n_states, "number of random states")->capture_default_str();

  std::vector<std::string> argv_vec = args;
  std::vector<char*> argv;
  std::string prog = "corikit";
  argv.push_back(prog.data());
  for (auto& a : argv_vec) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (coriolis->parsed()) return cmd_coriolis(model_path, st, out_path);
    if (christoffel->parsed()) return cmd_christoffel(model_path, st, method, out_path);
    if (regress->parsed()) return cmd_regressors(model_path, st, out_path);
    if (identify->parsed())
      return cmd_identify(model_path, traj_path, lambda, theta_scale, out_path);
    if (simulate_cmd->parsed()) return cmd_simulate(sim);
    if (bench->parsed())
      return cmd_bench(family, sizes, reps, bench_seed, bench->count("--out") ? out_path : "");
    if (validate->parsed()) return cmd_validate(model_path, val_seed, n_states);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kUsageError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace corikit::cli
