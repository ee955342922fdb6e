#include "corikit/joints.hpp"

#include <cmath>
#include <stdexcept>

namespace corikit {

Quat quat_exp(const Vec3& phi) {
  const double angle = phi.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * phi.x(), 0.5 * phi.y(), 0.5 * phi.z());
    q.normalize();
    return q;
  }
  const Vec3 axis = phi / angle;
  const double half = 0.5 * angle;
  const double s = std::sin(half);
  return Quat(std::cos(half), s * axis.x(), s * axis.y(), s * axis.z());
}

void se3_exp(const Vec6& xi, Quat& dq, Vec3& dp) {
  const Vec3 w = angular_part(xi);
  const Vec3 u = linear_part(xi);
  dq = quat_exp(w);
  const double theta = w.norm();
  Mat3 V;
  if (theta < 1e-8) {
    V = Mat3::Identity() + 0.5 * skew(w) + skew(w) * skew(w) / 6.0;
  } else {
    const Mat3 wx = skew(w);
    V = Mat3::Identity() + (1.0 - std::cos(theta)) / (theta * theta) * wx +
        (theta - std::sin(theta)) / (theta * theta * theta) * wx * wx;
  }
  dp = V * u;
}

int joint_nq(JointKind kind) {
  switch (kind) {
    case JointKind::revolute:
    case JointKind::prismatic:
    case JointKind::helical: return 1;
    case JointKind::spherical: return 4;
    case JointKind::free_joint: return 7;
    case JointKind::translational: return 3;
  }
  return 0;
}

int joint_nv(JointKind kind) {
  switch (kind) {
    case JointKind::revolute:
    case JointKind::prismatic:
    case JointKind::helical: return 1;
    case JointKind::spherical: return 3;
    case JointKind::free_joint: return 6;
    case JointKind::translational: return 3;
  }
  return 0;
}

bool joint_is_coordinate(JointKind kind) {
  switch (kind) {
    case JointKind::revolute:
    case JointKind::prismatic:
    case JointKind::helical:
    case JointKind::translational: return true;
    default: return false;
  }
}

Mat3 rpy_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

void JointSpec::set_offset(const Vec3& xyz, const Vec3& rpy) {
  offset_xyz = xyz;
  offset_rpy = rpy;
  offset = SpatialTransform(rpy_matrix(rpy).transpose(), xyz);
}

namespace {

Quat read_quat(const Eigen::Ref<const VecX>& q) {
  // storage order w, x, y, z
  Quat out(q[0], q[1], q[2], q[3]);
  return out;
}

}  // namespace

SpatialTransform joint_motion(const JointSpec& j, const Eigen::Ref<const VecX>& q) {
  switch (j.kind) {
    case JointKind::revolute:
      return SpatialTransform::RotationAbout(j.axis, q[0]);
    case JointKind::prismatic:
      return SpatialTransform::Translation(q[0] * j.axis.normalized());
    case JointKind::helical: {
      const Vec3 a = j.axis.normalized();
      return SpatialTransform(SpatialTransform::RotationAbout(a, q[0]).rotation(),
                              j.pitch * q[0] * a);
    }
    case JointKind::spherical: {
      const Quat quat = read_quat(q);
      return SpatialTransform::Rotation(quat.toRotationMatrix().transpose());
    }
    case JointKind::free_joint: {
      const Quat quat = read_quat(q.head<4>());
      return SpatialTransform(quat.toRotationMatrix().transpose(), q.tail<3>());
    }
    case JointKind::translational:
      return SpatialTransform::Translation(q.head<3>());
  }
  throw std::logic_error("unknown joint kind");
}

SpatialTransform joint_transform(const JointSpec& j, const Eigen::Ref<const VecX>& q) {
  return joint_motion(j, q) * j.offset;
}

MatX joint_motion_subspace(const JointSpec& j, const Eigen::Ref<const VecX>&) {
  MatX phi = MatX::Zero(6, joint_nv(j.kind));
  switch (j.kind) {
    case JointKind::revolute:
      phi.col(0).head<3>() = j.axis.normalized();
      break;
    case JointKind::prismatic:
      phi.col(0).tail<3>() = j.axis.normalized();
      break;
    case JointKind::helical: {
      const Vec3 a = j.axis.normalized();
      phi.col(0).head<3>() = a;
      phi.col(0).tail<3>() = j.pitch * a;
      break;
    }
    case JointKind::spherical:
      phi.topLeftCorner<3, 3>().setIdentity();
      break;
    case JointKind::free_joint:
      phi.setIdentity();
      break;
    case JointKind::translational:
      phi.bottomLeftCorner<3, 3>().setIdentity();
      break;
  }
  return phi;
}

MatX joint_ring(const JointSpec& j, const Eigen::Ref<const VecX>&,
                const Eigen::Ref<const VecX>&) {
  return MatX::Zero(6, joint_nv(j.kind));
}

VecX joint_neutral_config(JointKind kind) {
  VecX q = VecX::Zero(joint_nq(kind));
  if (kind == JointKind::spherical || kind == JointKind::free_joint) q[0] = 1.0;
  return q;
}

VecX joint_config_rate(const JointSpec& j, const Eigen::Ref<const VecX>& q,
                       const Eigen::Ref<const VecX>& v) {
  switch (j.kind) {
    case JointKind::revolute:
    case JointKind::prismatic:
    case JointKind::helical:
    case JointKind::translational:
      return v;
    case JointKind::spherical: {
      const Quat quat = read_quat(q);
      const Quat omega(0.0, v[0], v[1], v[2]);
      const Quat qd = quat * omega;
      VecX out(4);
      out << 0.5 * qd.w(), 0.5 * qd.x(), 0.5 * qd.y(), 0.5 * qd.z();
      return out;
    }
    case JointKind::free_joint: {
      const Quat quat = read_quat(q.head<4>());
      const Quat omega(0.0, v[0], v[1], v[2]);
      const Quat qd = quat * omega;
      VecX out(7);
      out << 0.5 * qd.w(), 0.5 * qd.x(), 0.5 * qd.y(), 0.5 * qd.z(),
          quat.toRotationMatrix() * v.tail<3>();
      return out;
    }
  }
  throw std::logic_error("unknown joint kind");
}

VecX joint_integrate(const JointSpec& j, const Eigen::Ref<const VecX>& q,
                     const Eigen::Ref<const VecX>& v, double dt) {
  switch (j.kind) {
    case JointKind::revolute:
    case JointKind::prismatic:
    case JointKind::helical:
    case JointKind::translational:
      return q + dt * v;
    case JointKind::spherical: {
      const Quat quat = read_quat(q);
      Quat out = quat * quat_exp(dt * v.head<3>());
      out.normalize();
      return (VecX(4) << out.w(), out.x(), out.y(), out.z()).finished();
    }
    case JointKind::free_joint: {
      const Quat quat = read_quat(q.head<4>());
      Quat dq;
      Vec3 dp;
      se3_exp(dt * v, dq, dp);
      Quat out = quat * dq;
      out.normalize();
      const Vec3 p = q.tail<3>() + quat.toRotationMatrix() * dp;
      return (VecX(7) << out.w(), out.x(), out.y(), out.z(), p).finished();
    }
  }
  throw std::logic_error("unknown joint kind");
}

void joint_normalize(JointKind kind, Eigen::Ref<VecX> q) {
  if (kind == JointKind::spherical || kind == JointKind::free_joint) {
    q.head<4>() /= q.head<4>().norm();
  }
}

double joint_config_defect(JointKind kind, const Eigen::Ref<const VecX>& q) {
  if (kind == JointKind::spherical || kind == JointKind::free_joint) {
    return std::abs(q.head<4>().norm() - 1.0);
  }
  return 0.0;
}

}  // namespace corikit
