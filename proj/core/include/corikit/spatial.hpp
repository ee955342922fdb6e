#pragma once

#include <Eigen/Dense>

// 6D spatial vector algebra. Motion and force vectors are stored as
// 6-vectors with the angular block first: v = [omega; v_lin], f = [n; f_lin].
namespace corikit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

using MotionVector = Vec6;
using ForceVector = Vec6;

// theta = [m, h_x, h_y, h_z, Ixx, Iyy, Izz, Ixy, Ixz, Iyz]
using InertialParams = Eigen::Matrix<double, 10, 1>;

inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return s;
}

inline Vec3 unskew(const Mat3& s) {
  return Vec3(0.5 * (s(2, 1) - s(1, 2)), 0.5 * (s(0, 2) - s(2, 0)),
              0.5 * (s(1, 0) - s(0, 1)));
}

inline MotionVector motion_vector(const Vec3& angular, const Vec3& linear) {
  MotionVector v;
  v << angular, linear;
  return v;
}

inline Vec3 angular_part(const Vec6& v) { return v.head<3>(); }
inline Vec3 linear_part(const Vec6& v) { return v.tail<3>(); }

/// Spatial cross-product operator (v x) acting on motion vectors.
Mat6 cross_motion(const MotionVector& v);

/// Force-space dual (v x#) = -(v x)^T.
Mat6 cross_force_dual(const MotionVector& v);

/// The operator (f xbar#) defined by (f xbar#) w == (w x#) f for all w.
Mat6 bar_cross_sharp(const ForceVector& f);

/// Rigid transform between spatial coordinate frames, stored as the
/// rotation E (domain coords -> codomain coords) and the translation r
/// (codomain frame origin expressed in domain coords).
class SpatialTransform {
 public:
  SpatialTransform() : E_(Mat3::Identity()), r_(Vec3::Zero()) {}
  SpatialTransform(const Mat3& E, const Vec3& r) : E_(E), r_(r) {}

  static SpatialTransform Identity() { return SpatialTransform(); }
  static SpatialTransform Rotation(const Mat3& E) {
    return SpatialTransform(E, Vec3::Zero());
  }
  static SpatialTransform Translation(const Vec3& r) {
    return SpatialTransform(Mat3::Identity(), r);
  }
  /// Frame rotated by `angle` about `axis` relative to the domain frame.
  static SpatialTransform RotationAbout(const Vec3& axis, double angle);

  const Mat3& rotation() const { return E_; }
  const Vec3& translation() const { return r_; }

  /// 6x6 matrix acting on motion vectors: [[E, 0], [-E r_x, E]].
  Mat6 motion_matrix() const;
  /// 6x6 matrix acting on force vectors, equal to motion_matrix()^{-T}.
  Mat6 force_matrix() const;

  MotionVector apply_motion(const MotionVector& v) const;
  /// Transforms a force covector consistently with power invariance:
  /// (X v)^T (X^{-T} f) == v^T f.
  ForceVector apply_force(const ForceVector& f) const;

  SpatialTransform inverse() const { return SpatialTransform(E_.transpose(), -E_ * r_); }

  /// Composition: (B<-A) * (A<-W) = (B<-W).
  SpatialTransform operator*(const SpatialTransform& rhs) const {
    return SpatialTransform(E_ * rhs.E_, rhs.r_ + rhs.E_.transpose() * r_);
  }

  /// Max deviation of E from SO(3) (orthogonality residual and det drift).
  double rotation_defect() const;

 private:
  Mat3 E_;
  Vec3 r_;
};

/// Rigid-body spatial inertia about the body frame origin,
/// I = [[Ibar, h_x], [h_x^T, m 1]], parameterized by the 10 classical
/// inertial parameters.
class SpatialInertia {
 public:
  SpatialInertia() : mass_(0.0), h_(Vec3::Zero()), Ibar_(Mat3::Zero()) {}
  SpatialInertia(double mass, const Vec3& first_moment, const Mat3& rot_inertia)
      : mass_(mass), h_(first_moment), Ibar_(0.5 * (rot_inertia + rot_inertia.transpose())) {}

  static SpatialInertia FromParams(const InertialParams& theta);
  static SpatialInertia FromMatrix(const Mat6& I);

  double mass() const { return mass_; }
  const Vec3& first_moment() const { return h_; }
  const Mat3& rot_inertia() const { return Ibar_; }

  InertialParams params() const;
  Mat6 matrix() const;

  ForceVector apply(const MotionVector& v) const { return matrix() * v; }

  /// Congruence transform X^T I X. With X = (child <- parent) and *this
  /// expressed in the child frame, the result is the same inertia expressed
  /// in the parent frame.
  SpatialInertia transformed_by(const SpatialTransform& X) const;

  SpatialInertia operator+(const SpatialInertia& other) const {
    return SpatialInertia(mass_ + other.mass_, h_ + other.h_, Ibar_ + other.Ibar_);
  }

  /// Positive-semidefiniteness of the 4x4 pseudo-inertia; only meaningful
  /// for physically realizable bodies, so checked on demand.
  bool physically_consistent(double tol = 1e-10) const;

 private:
  double mass_;
  Vec3 h_;
  Mat3 Ibar_;
};

/// Christoffel-consistent single-body Coriolis matrix
///   C = 1/2 [ I (v x) + (v x#) I + (I v) xbar# ].
Mat6 body_coriolis_star(const SpatialInertia& I, const MotionVector& v);

/// Body-level factorization B = C - I (v x); satisfies B^T v = 0.
Mat6 body_coriolis_B(const SpatialInertia& I, const MotionVector& v);

// --- stacked (cluster-level) helpers -------------------------------------
// Stacked vectors hold one 6-block per body; operators act blockwise.

/// BlockDiag of cross_motion over the 6-blocks of v (dim must be 6n).
MatX stacked_cross_motion(const VecX& v);

/// BlockDiag of bar_cross_sharp over the 6-blocks of f.
MatX stacked_bar_cross_sharp(const VecX& f);

/// Cluster-level B(I, v) = 1/2 [ (v x#) I + (I v) xbar# - I (v x) ] for a
/// (possibly composite) inertia matrix I of size 6n x 6n.
MatX stacked_coriolis_B(const MatX& I, const VecX& v);

}  // namespace corikit
