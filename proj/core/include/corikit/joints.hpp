#pragma once

#include <Eigen/Dense>

#include "corikit/spatial.hpp"

namespace corikit {

using Quat = Eigen::Quaterniond;

/// Unit quaternion for a rotation of |phi| about phi/|phi| (body-frame axis).
Quat quat_exp(const Vec3& phi);

/// SE(3) exponential of the twist xi = [omega; v]: returns the rotation as a
/// quaternion and the translation expressed in the starting frame.
void se3_exp(const Vec6& xi, Quat& dq, Vec3& dp);

enum class JointKind {
  revolute,
  prismatic,
  helical,
  spherical,
  free_joint,
  translational,  // 3-DoF Cartesian translation, q in R^3
};

int joint_nq(JointKind kind);
int joint_nv(JointKind kind);
/// True when generalized speeds are plain coordinate rates (q_dot = v).
bool joint_is_coordinate(JointKind kind);

struct JointSpec {
  JointKind kind = JointKind::revolute;
  Vec3 axis = Vec3::UnitZ();
  double pitch = 0.0;                           // helical only (m/rad)
  Vec3 offset_xyz = Vec3::Zero();               // joint frame origin in parent coords
  Vec3 offset_rpy = Vec3::Zero();               // joint frame orientation, x-y-z rolls
  SpatialTransform offset;                      // derived: parent body frame -> joint frame

  /// Sets the fixed offset; keeps the raw xyz/rpy fields as the serialized
  /// form so model files round-trip bit-exactly.
  void set_offset(const Vec3& xyz, const Vec3& rpy);
};

Mat3 rpy_matrix(const Vec3& rpy);  // Rz(yaw) Ry(pitch) Rx(roll)

/// Transform across the joint alone (joint frame -> child body frame).
SpatialTransform joint_motion(const JointSpec& j, const Eigen::Ref<const VecX>& q);

/// Child <- parent body frame: joint motion composed with the fixed offset.
SpatialTransform joint_transform(const JointSpec& j, const Eigen::Ref<const VecX>& q);

/// Free-mode matrix Phi, 6 x nv, expressed in the child body frame.
MatX joint_motion_subspace(const JointSpec& j, const Eigen::Ref<const VecX>& q);

/// Local-coordinate rate of Phi. Zero for all single-joint kinds here: axes
/// are constant, and spherical/free joints use body-frame velocity as
/// generalized speeds.
MatX joint_ring(const JointSpec& j, const Eigen::Ref<const VecX>& q,
                const Eigen::Ref<const VecX>& v);

/// Neutral configuration (zeros; identity quaternion where applicable).
VecX joint_neutral_config(JointKind kind);

/// Coordinate rate q_dot given generalized speeds v.
VecX joint_config_rate(const JointSpec& j, const Eigen::Ref<const VecX>& q,
                       const Eigen::Ref<const VecX>& v);

/// Exponential-map step: advance q by dt along constant v, renormalizing
/// quaternion blocks. Used for flow perturbations and plain stepping.
VecX joint_integrate(const JointSpec& j, const Eigen::Ref<const VecX>& q,
                     const Eigen::Ref<const VecX>& v, double dt);

void joint_normalize(JointKind kind, Eigen::Ref<VecX> q);

/// Max deviation of quaternion norms from 1 (0 for scalar joints).
double joint_config_defect(JointKind kind, const Eigen::Ref<const VecX>& q);

}  // namespace corikit
