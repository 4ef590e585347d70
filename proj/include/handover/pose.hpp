#pragma once

#include <Eigen/Core>

#include "handover/quat.hpp"

namespace handover {

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Rotation-representation conversions. Euler angles are extrinsic
// fixed-axis XYZ (roll about world X, then pitch about world Y, then yaw
// about world Z): R = Rz(yaw) * Ry(pitch) * Rx(roll). Extraction returns
// the canonical chart with pitch in [-pi/2, pi/2]; at the |pitch| = pi/2
// singularity roll is set to 0 and yaw absorbs the free angle.
Eigen::Matrix3d quat_to_matrix(const Quaternion& q);
Quaternion matrix_to_quat(const Eigen::Matrix3d& r);
Eigen::Matrix3d euler_xyz_to_matrix(const Eigen::Vector3d& rpy);
Eigen::Vector3d matrix_to_euler_xyz(const Eigen::Matrix3d& r);
Quaternion euler_xyz_to_quat(const Eigen::Vector3d& rpy);
Eigen::Vector3d quat_to_euler_xyz(const Quaternion& q);

// Rigid transform. The quaternion is the authoritative rotation state;
// Euler and matrix forms are derived views.
struct Pose {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Quaternion rotation;

  Eigen::Vector3d euler_xyz() const { return quat_to_euler_xyz(rotation); }
  Eigen::Matrix3d matrix() const { return quat_to_matrix(rotation); }

  // Applies this transform to a point: rotation * p + translation.
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation.rotate(p) + translation;
  }
};

// Frame chaining a then b in a's frame: x -> a.apply(b.apply(x)).
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

// Unit dual-quaternion encoding of the pose (and back). Round trip is exact
// to floating-point accuracy.
DualQuaternion pose_to_dq(const Pose& p);
Pose pose_from_dq(const DualQuaternion& q);

bool pose_identical(const Pose& a, const Pose& b);

}  // namespace handover
