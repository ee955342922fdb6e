#pragma once

#include <string>
#include <vector>

#include "corikit/model.hpp"

namespace corikit {

/// One scaling-table row: best-of-reps wall times in microseconds.
struct BenchRow {
  int n_bodies = 0;
  int depth = 0;
  double t_coriolis_us = 0.0;
  double t_sweep_us = 0.0;
  double t_fast_us = 0.0;
  double t_rnea_us = 0.0;
};

/// Times the Coriolis recursion, the unit-vector Christoffel sweep, and the
/// tensor Christoffel recursion on generated trees. family: "chain" or
/// "btree".
std::vector<BenchRow> run_scaling_bench(const std::string& family, const std::vector<int>& sizes,
                                        int reps, std::uint64_t seed);

int tree_depth(const MechanismModel& model);

/// Least-squares fit of log y = a + b log x; returns (slope, R^2).
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

std::string bench_table_csv(const std::vector<BenchRow>& rows);

}  // namespace corikit
