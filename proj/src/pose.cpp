#include "handover/pose.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace handover {
namespace {

constexpr double kPi = std::numbers::pi;

// |r20| beyond this counts as gimbal lock; asin is ill-conditioned there.
constexpr double kGimbalEps = 1e-12;

}  // namespace

double wrap_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

Eigen::Matrix3d quat_to_matrix(const Quaternion& q) {
  if (!q.is_unit()) {
    throw std::invalid_argument("quat_to_matrix: quaternion is not unit");
  }
  const Quaternion u = q.normalized();
  const double w = u.w, x = u.x, y = u.y, z = u.z;
  Eigen::Matrix3d r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z),
      2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z),
      2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x),
      1.0 - 2.0 * (x * x + y * y);
  return r;
}

Quaternion matrix_to_quat(const Eigen::Matrix3d& r) {
  // Shepperd's method: branch on the largest diagonal combination so the
  // divisor stays well away from zero.
  const double tr = r.trace();
  Quaternion q;
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (r(2, 1) - r(1, 2)) / s;
    q.y = (r(0, 2) - r(2, 0)) / s;
    q.z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    q.w = (r(2, 1) - r(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (r(0, 1) + r(1, 0)) / s;
    q.z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    q.w = (r(0, 2) - r(2, 0)) / s;
    q.x = (r(0, 1) + r(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (r(1, 2) + r(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    q.w = (r(1, 0) - r(0, 1)) / s;
    q.x = (r(0, 2) + r(2, 0)) / s;
    q.y = (r(1, 2) + r(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return canonicalized(q.normalized());
}

Eigen::Matrix3d euler_xyz_to_matrix(const Eigen::Vector3d& rpy) {
  const double cr = std::cos(rpy.x()), sr = std::sin(rpy.x());
  const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return rz * ry * rx;
}

Eigen::Vector3d matrix_to_euler_xyz(const Eigen::Matrix3d& r) {
  // R = Rz*Ry*Rx gives r20 = -sin(pitch).
  const double sp = -r(2, 0);
  if (sp >= 1.0 - kGimbalEps) {
    // pitch = +pi/2: only yaw - roll is observable; report roll = 0.
    return {0.0, 0.5 * kPi, wrap_angle(std::atan2(r(1, 2), r(1, 1)))};
  }
  if (sp <= -1.0 + kGimbalEps) {
    // pitch = -pi/2: only yaw + roll is observable; report roll = 0.
    return {0.0, -0.5 * kPi, wrap_angle(std::atan2(-r(1, 2), r(1, 1)))};
  }
  return {wrap_angle(std::atan2(r(2, 1), r(2, 2))), std::asin(sp),
          wrap_angle(std::atan2(r(1, 0), r(0, 0)))};
}

Quaternion euler_xyz_to_quat(const Eigen::Vector3d& rpy) {
  const Quaternion qx =
      Quaternion::from_axis_angle(Eigen::Vector3d::UnitX(), rpy.x());
  const Quaternion qy =
      Quaternion::from_axis_angle(Eigen::Vector3d::UnitY(), rpy.y());
  const Quaternion qz =
      Quaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), rpy.z());
  return canonicalized(quat_mul(qz, quat_mul(qy, qx)));
}

Eigen::Vector3d quat_to_euler_xyz(const Quaternion& q) {
  return matrix_to_euler_xyz(quat_to_matrix(q));
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.translation = a.apply(b.translation);
  Quaternion q = quat_mul(a.rotation, b.rotation);
  out.rotation = q.normalized();
  return out;
}

Pose inverse(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.conjugate().normalized();
  out.translation = -out.rotation.rotate(p.translation);
  return out;
}

DualQuaternion pose_to_dq(const Pose& p) {
  return dq_from_pose(p.rotation, p.translation);
}

Pose pose_from_dq(const DualQuaternion& q) {
  auto [rotation, translation] = dq_to_pose(q);
  return {translation, rotation};
}

bool pose_identical(const Pose& a, const Pose& b) {
  return (a.translation.array() == b.translation.array()).all() &&
         a.rotation.w == b.rotation.w && a.rotation.x == b.rotation.x &&
         a.rotation.y == b.rotation.y && a.rotation.z == b.rotation.z;
}

}  // namespace handover
