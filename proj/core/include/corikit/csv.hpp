#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace corikit::csv {

/// Full-precision scalar formatting so outputs are diffable and round-trip.
std::string num(double x);

void write_matrix(std::ostream& os, const std::string& tag, const Eigen::MatrixXd& M);

/// Simple table: one header row of column names, numeric rows, '#' comments.
struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;

  int column(const std::string& name) const;           // -1 if absent
  std::vector<int> columns_with_prefix(const std::string& prefix) const;
};

Table read_table(const std::string& path);
void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const Eigen::MatrixXd& data, const std::string& comment = "");

}  // namespace corikit::csv
