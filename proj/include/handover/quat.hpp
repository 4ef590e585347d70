#pragma once

#include <utility>

#include <Eigen/Core>

namespace handover {

// Unit quaternion in scalar-first (w, x, y, z) layout, Hamilton product
// convention. Default-constructed value is the identity rotation.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }

  // Pure quaternion (0, v) used to embed vectors for rotation/translation.
  static Quaternion pure(const Eigen::Vector3d& v) {
    return {0.0, v.x(), v.y(), v.z()};
  }

  // axis need not be normalized; zero axis yields identity.
  static Quaternion from_axis_angle(const Eigen::Vector3d& axis, double angle);

  Eigen::Vector3d vec() const { return {x, y, z}; }
  double norm() const;
  double dot(const Quaternion& o) const {
    return w * o.w + x * o.x + y * o.y + z * o.z;
  }
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion normalized() const;
  bool is_unit(double tol = 1e-6) const;

  // Rotates v by this quaternion (must be unit within 1e-6).
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;
};

// Hamilton product a*b (apply b first, then a, when both are rotations
// acting on column vectors).
Quaternion quat_mul(const Quaternion& a, const Quaternion& b);
inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return quat_mul(a, b);
}

// Dual quaternion primary + eps*dual with eps^2 = 0. A rigid transform
// (R, t) is encoded as primary = q_R, dual = 0.5 * q_R * (0, t), i.e. the
// dual part carries the translation expressed along the rotated axes.
// Unit condition: |primary| = 1 and dot(primary, dual) = 0.
struct DualQuaternion {
  Quaternion primary;
  Quaternion dual{0.0, 0.0, 0.0, 0.0};

  static DualQuaternion identity() { return {}; }

  bool is_unit(double tol = 1e-6) const;
};

// Sign-canonical representative of the q/-q double cover: w > 0, or if
// w == 0 the first nonzero of (x, y, z) is positive.
Quaternion canonicalized(const Quaternion& q);

// Same rule keyed on the primary part; the whole 8-vector flips together so
// the encoded transform is unchanged.
DualQuaternion canonicalized(const DualQuaternion& q);

// Dual-number product; re-normalizes the primary part when accumulated
// drift exceeds 1e-12 so long chains stay unit.
DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b);

DualQuaternion dq_conj(const DualQuaternion& q);

// Relative transform conj(a)*b, sign-canonicalized. Equals identity iff the
// operands encode the same pose. Throws std::invalid_argument when either
// operand is not unit within 1e-6.
DualQuaternion dq_diff(const DualQuaternion& a, const DualQuaternion& b);

// Encodes (rotation, translation); result is sign-canonical and unit to
// within 1e-9. rotation must be unit within 1e-6.
DualQuaternion dq_from_pose(const Quaternion& rotation,
                            const Eigen::Vector3d& translation);

// Exact inverse of dq_from_pose: rotation = canonical primary,
// translation = 2 * vec(conj(primary) * dual).
std::pair<Quaternion, Eigen::Vector3d> dq_to_pose(const DualQuaternion& q);

// Euclidean norm of the 8 components of dq_diff(a, b) - identity. Zero iff
// same pose; for a pure translation delta this is |delta| / 2, for a pure
// rotation by theta it is 2*|sin(theta/4)|.
double dq_distance(const DualQuaternion& a, const DualQuaternion& b);

// Rotation-only part of dq_distance: norm of the primary components of
// dq_diff(a, b) - identity, i.e. 2*|sin(theta/4)| for a rotation gap theta.
double dq_rotation_distance(const DualQuaternion& a, const DualQuaternion& b);

}  // namespace handover
