#include "handover/quat.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace handover {
namespace {

void require_unit(const Quaternion& q, const char* what) {
  if (!q.is_unit()) {
    throw std::invalid_argument(std::string(what) +
                                ": quaternion is not unit (|q| = " +
                                std::to_string(q.norm()) + ")");
  }
}

void require_unit(const DualQuaternion& q, const char* what) {
  if (!q.is_unit()) {
    throw std::invalid_argument(std::string(what) +
                                ": dual quaternion violates the unit "
                                "condition (|p| = " +
                                std::to_string(q.primary.norm()) +
                                ", dot(p, d) = " +
                                std::to_string(q.primary.dot(q.dual)) + ")");
  }
}

Quaternion scaled(const Quaternion& q, double s) {
  return {q.w * s, q.x * s, q.y * s, q.z * s};
}

Quaternion sum(const Quaternion& a, const Quaternion& b) {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

}  // namespace

Quaternion Quaternion::from_axis_angle(const Eigen::Vector3d& axis,
                                       double angle) {
  const double n = axis.norm();
  if (n == 0.0) return identity();
  const double half = 0.5 * angle;
  const Eigen::Vector3d u = axis * (std::sin(half) / n);
  return {std::cos(half), u.x(), u.y(), u.z()};
}

double Quaternion::norm() const { return std::sqrt(dot(*this)); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (n == 0.0) {
    throw std::invalid_argument("Quaternion::normalized: zero quaternion");
  }
  return scaled(*this, 1.0 / n);
}

bool Quaternion::is_unit(double tol) const {
  return std::abs(norm() - 1.0) <= tol;
}

Eigen::Vector3d Quaternion::rotate(const Eigen::Vector3d& v) const {
  require_unit(*this, "Quaternion::rotate");
  return quat_mul(quat_mul(*this, pure(v)), conjugate()).vec();
}

Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

bool DualQuaternion::is_unit(double tol) const {
  return primary.is_unit(tol) && std::abs(primary.dot(dual)) <= tol;
}

namespace {

bool flips_sign(const Quaternion& p) {
  double lead = p.w;
  if (lead == 0.0) lead = p.x;
  if (lead == 0.0) lead = p.y;
  if (lead == 0.0) lead = p.z;
  return lead < 0.0;
}

}  // namespace

Quaternion canonicalized(const Quaternion& q) {
  return flips_sign(q) ? scaled(q, -1.0) : q;
}

DualQuaternion canonicalized(const DualQuaternion& q) {
  if (!flips_sign(q.primary)) return q;
  return {scaled(q.primary, -1.0), scaled(q.dual, -1.0)};
}

DualQuaternion dq_mul(const DualQuaternion& a, const DualQuaternion& b) {
  DualQuaternion out{quat_mul(a.primary, b.primary),
                     sum(quat_mul(a.primary, b.dual),
                         quat_mul(a.dual, b.primary))};
  const double n = out.primary.norm();
  if (std::abs(n - 1.0) > 1e-12 && n > 0.0) {
    const double inv = 1.0 / n;
    out.primary = scaled(out.primary, inv);
    out.dual = scaled(out.dual, inv);
  }
  return out;
}

DualQuaternion dq_conj(const DualQuaternion& q) {
  return {q.primary.conjugate(), q.dual.conjugate()};
}

DualQuaternion dq_diff(const DualQuaternion& a, const DualQuaternion& b) {
  require_unit(a, "dq_diff: lhs");
  require_unit(b, "dq_diff: rhs");
  return canonicalized(dq_mul(dq_conj(a), b));
}

DualQuaternion dq_from_pose(const Quaternion& rotation,
                            const Eigen::Vector3d& translation) {
  require_unit(rotation, "dq_from_pose");
  const Quaternion r = rotation.normalized();
  return canonicalized(
      {r, scaled(quat_mul(r, Quaternion::pure(translation)), 0.5)});
}

std::pair<Quaternion, Eigen::Vector3d> dq_to_pose(const DualQuaternion& q) {
  require_unit(q, "dq_to_pose");
  const DualQuaternion c = canonicalized(q);
  const Quaternion t = quat_mul(c.primary.conjugate(), c.dual);
  return {c.primary.normalized(), 2.0 * t.vec()};
}

double dq_distance(const DualQuaternion& a, const DualQuaternion& b) {
  const DualQuaternion d = dq_diff(a, b);
  const Quaternion p{d.primary.w - 1.0, d.primary.x, d.primary.y, d.primary.z};
  return std::sqrt(p.dot(p) + d.dual.dot(d.dual));
}

double dq_rotation_distance(const DualQuaternion& a, const DualQuaternion& b) {
  const DualQuaternion d = dq_diff(a, b);
  const Quaternion p{d.primary.w - 1.0, d.primary.x, d.primary.y, d.primary.z};
  return std::sqrt(p.dot(p));
}

}  // namespace handover
