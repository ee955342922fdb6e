#pragma once

#include <doctest.h>

#include <string>

#include "corikit/model.hpp"
#include "corikit/oracles.hpp"

namespace testutil {

inline std::string model_path(const std::string& name) {
  return std::string(CORIKIT_MODELS_DIR) + "/" + name;
}

inline corikit::MechanismModel load_model(const std::string& name) {
  return corikit::MechanismModel::load(model_path(name));
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

#define CHECK_MATRIX_NEAR(a, b, tol) CHECK(testutil::max_abs_diff((a), (b)) <= (tol))
#define CHECK_MATRIX_REL(a, b, tol) CHECK(testutil::rel_err((a), (b)) <= (tol))

}  // namespace testutil
