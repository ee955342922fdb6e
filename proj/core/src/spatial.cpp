#include "corikit/spatial.hpp"

#include <stdexcept>

namespace corikit {

Mat6 cross_motion(const MotionVector& v) {
  Mat6 m = Mat6::Zero();
  const Mat3 wx = skew(angular_part(v));
  m.topLeftCorner<3, 3>() = wx;
  m.bottomRightCorner<3, 3>() = wx;
  m.bottomLeftCorner<3, 3>() = skew(linear_part(v));
  return m;
}

Mat6 cross_force_dual(const MotionVector& v) { return -cross_motion(v).transpose(); }

Mat6 bar_cross_sharp(const ForceVector& f) {
  // Built column-by-column from the defining contract
  // (f xbar#) e_k = (e_k x#) f; avoids hand-derived block signs.
  Mat6 m;
  for (int k = 0; k < 6; ++k) {
    m.col(k) = cross_force_dual(Vec6::Unit(k)) * f;
  }
  return m;
}

SpatialTransform SpatialTransform::RotationAbout(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  // E maps domain coords to the frame rotated by +angle about a.
  const Mat3 E = Eigen::AngleAxisd(angle, a).toRotationMatrix().transpose();
  return SpatialTransform(E, Vec3::Zero());
}

Mat6 SpatialTransform::motion_matrix() const {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = E_;
  m.bottomRightCorner<3, 3>() = E_;
  m.bottomLeftCorner<3, 3>() = -E_ * skew(r_);
  return m;
}

Mat6 SpatialTransform::force_matrix() const {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = E_;
  m.bottomRightCorner<3, 3>() = E_;
  m.topRightCorner<3, 3>() = -E_ * skew(r_);
  return m;
}

MotionVector SpatialTransform::apply_motion(const MotionVector& v) const {
  const Vec3 w = angular_part(v);
  return motion_vector(E_ * w, E_ * (linear_part(v) - r_.cross(w)));
}

ForceVector SpatialTransform::apply_force(const ForceVector& f) const {
  const Vec3 fl = linear_part(f);
  ForceVector out;
  out << E_ * (angular_part(f) - r_.cross(fl)), E_ * fl;
  return out;
}

double SpatialTransform::rotation_defect() const {
  const double ortho = (E_.transpose() * E_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = std::abs(E_.determinant() - 1.0);
  return std::max(ortho, det);
}

SpatialInertia SpatialInertia::FromParams(const InertialParams& theta) {
  Mat3 Ibar;
  Ibar << theta[4], theta[7], theta[8],
          theta[7], theta[5], theta[9],
          theta[8], theta[9], theta[6];
  return SpatialInertia(theta[0], theta.segment<3>(1), Ibar);
}

SpatialInertia SpatialInertia::FromMatrix(const Mat6& I) {
  const double m = I.bottomRightCorner<3, 3>().trace() / 3.0;
  const Vec3 h = unskew(I.topRightCorner<3, 3>());
  const Mat3 Ibar = 0.5 * (I.topLeftCorner<3, 3>() + I.topLeftCorner<3, 3>().transpose());
  return SpatialInertia(m, h, Ibar);
}

InertialParams SpatialInertia::params() const {
  InertialParams theta;
  theta << mass_, h_.x(), h_.y(), h_.z(), Ibar_(0, 0), Ibar_(1, 1), Ibar_(2, 2),
      Ibar_(0, 1), Ibar_(0, 2), Ibar_(1, 2);
  return theta;
}

Mat6 SpatialInertia::matrix() const {
  Mat6 I = Mat6::Zero();
  I.topLeftCorner<3, 3>() = Ibar_;
  I.topRightCorner<3, 3>() = skew(h_);
  I.bottomLeftCorner<3, 3>() = skew(h_).transpose();
  I.bottomRightCorner<3, 3>() = mass_ * Mat3::Identity();
  return I;
}

SpatialInertia SpatialInertia::transformed_by(const SpatialTransform& X) const {
  const Mat6 Xm = X.motion_matrix();
  return FromMatrix(Xm.transpose() * matrix() * Xm);
}

bool SpatialInertia::physically_consistent(double tol) const {
  Eigen::Matrix4d J;
  const Mat3 sigma = 0.5 * Ibar_.trace() * Mat3::Identity() - Ibar_;
  J.topLeftCorner<3, 3>() = sigma;
  J.topRightCorner<3, 1>() = h_;
  J.bottomLeftCorner<1, 3>() = h_.transpose();
  J(3, 3) = mass_;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(J);
  return es.eigenvalues().minCoeff() >= -tol;
}

Mat6 body_coriolis_star(const SpatialInertia& I, const MotionVector& v) {
  const Mat6 Im = I.matrix();
  const Mat6 vx = cross_motion(v);
  return 0.5 * (Im * vx - vx.transpose() * Im + bar_cross_sharp(Im * v));
}

Mat6 body_coriolis_B(const SpatialInertia& I, const MotionVector& v) {
  return body_coriolis_star(I, v) - I.matrix() * cross_motion(v);
}

MatX stacked_cross_motion(const VecX& v) {
  const Eigen::Index n = v.size();
  if (n % 6 != 0) throw std::invalid_argument("stacked vector size must be a multiple of 6");
  MatX m = MatX::Zero(n, n);
  for (Eigen::Index b = 0; b < n / 6; ++b) {
    m.block<6, 6>(6 * b, 6 * b) = cross_motion(v.segment<6>(6 * b));
  }
  return m;
}

MatX stacked_bar_cross_sharp(const VecX& f) {
  const Eigen::Index n = f.size();
  if (n % 6 != 0) throw std::invalid_argument("stacked vector size must be a multiple of 6");
  MatX m = MatX::Zero(n, n);
  for (Eigen::Index b = 0; b < n / 6; ++b) {
    m.block<6, 6>(6 * b, 6 * b) = bar_cross_sharp(f.segment<6>(6 * b));
  }
  return m;
}

MatX stacked_coriolis_B(const MatX& I, const VecX& v) {
  const MatX vx = stacked_cross_motion(v);
  return 0.5 * (-vx.transpose() * I + stacked_bar_cross_sharp(I * v) - I * vx);
}

}  // namespace corikit
