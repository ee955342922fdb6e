#include "corikit/benchkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "corikit/christoffel.hpp"
#include "corikit/dynamics.hpp"
#include "corikit/oracles.hpp"

namespace corikit {

namespace {

// Fastest observed run; scheduling noise only ever inflates a sample.
template <typename F>
double best_time_us(F&& fn, int reps) {
  using clock = std::chrono::steady_clock;
  double best = std::numeric_limits<double>::infinity();
  fn();  // warmup
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    best = std::min(best, std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int tree_depth(const MechanismModel& model) {
  int depth = 0;
  for (int k = 0; k < model.num_clusters(); ++k) {
    int d = 0;
    for (int i = k; i != -1; i = model.cluster(i).parent) ++d;
    depth = std::max(depth, d);
  }
  return depth;
}

std::vector<BenchRow> run_scaling_bench(const std::string& family, const std::vector<int>& sizes,
                                        int reps, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  for (int N : sizes) {
    const MechanismModel model =
        (family == "chain") ? oracles::random_open_chain(N, seed, true)
        : (family == "btree") ? oracles::balanced_revolute_tree(N, seed)
                              : throw std::invalid_argument("bench family must be chain or btree");
    const auto state = oracles::random_state(model, seed + N);
    BenchRow row;
    row.n_bodies = N;
    row.depth = tree_depth(model);
    row.t_coriolis_us =
        best_time_us([&] { coriolis_star(model, state.q, state.v); }, reps);
    // both Christoffel routes reuse one output tensor so the timings compare
    // algorithmic work, not first-touch faults on the m^3 array
    Tensor3 workspace;
    row.t_sweep_us = best_time_us(
        [&] { christoffel_sweep_into(model, state.q, workspace); }, std::max(reps / 4, 3));
    row.t_fast_us =
        best_time_us([&] { christoffel_fast_into(model, state.q, workspace); }, reps);
    row.t_rnea_us = best_time_us(
        [&] { rnea(model, state.q, state.v, state.v, true); }, reps);
    rows.push_back(row);
  }
  return rows;
}

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("need matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double nn = static_cast<double>(n);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double r_num = nn * sxy - sx * sy;
  const double r_den = std::sqrt((nn * sxx - sx * sx) * (nn * syy - sy * sy));
  const double r = r_den > 0 ? r_num / r_den : 0.0;
  return {slope, r * r};
}

std::string bench_table_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "# best wall time per call, microseconds\n";
  os << "n_bodies,depth,t_coriolis_us,t_christoffel_sweep_us,t_christoffel_fast_us,t_rnea_us\n";
  os.precision(6);
  for (const auto& r : rows) {
    os << r.n_bodies << ',' << r.depth << ',' << r.t_coriolis_us << ',' << r.t_sweep_us << ','
       << r.t_fast_us << ',' << r.t_rnea_us << '\n';
  }
  return os.str();
}

}  // namespace corikit
