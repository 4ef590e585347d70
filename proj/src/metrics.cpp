#include "handover/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace handover {

void MetricWeights::validate() const {
  if (!(psi > 0.0) || !(mu > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument(
        "MetricWeights: psi, mu and beta must be strictly positive");
  }
}

double euler_distance(const Pose& a, const Pose& b, const MetricWeights& w) {
  w.validate();
  const Eigen::Vector3d de = a.euler_xyz() - b.euler_xyz();
  const Eigen::Vector3d wrapped{wrap_angle(de.x()), wrap_angle(de.y()),
                                wrap_angle(de.z())};
  return w.psi * translation_distance(a, b) + w.mu * wrapped.norm();
}

double matrix_angle(const Pose& a, const Pose& b) {
  const Eigen::Matrix3d m = a.matrix().transpose() * b.matrix();
  const double c = (m.trace() - 1.0) / 2.0;
  // |sin| from the skew part. Solving atan2(|sin|, cos) instead of
  // acos(clamp(cos)) keeps the angle accurate near 0 and pi, where acos
  // turns the trace's last-bit rounding into ~1e-8 of angle.
  const Eigen::Vector3d skew{m(2, 1) - m(1, 2), m(0, 2) - m(2, 0),
                             m(1, 0) - m(0, 1)};
  return std::atan2(0.5 * skew.norm(), std::clamp(c, -1.0, 1.0));
}

double matrix_distance(const Pose& a, const Pose& b, const MetricWeights& w) {
  w.validate();
  return w.psi * translation_distance(a, b) + w.beta * matrix_angle(a, b);
}

double dq_pose_distance(const Pose& a, const Pose& b) {
  return dq_distance(pose_to_dq(a), pose_to_dq(b));
}

double dq_pose_rotation_distance(const Pose& a, const Pose& b) {
  return dq_rotation_distance(pose_to_dq(a), pose_to_dq(b));
}

double translation_distance(const Pose& a, const Pose& b) {
  return (a.translation - b.translation).norm();
}

MetricKind metric_from_string(const std::string& name) {
  if (name == "dq") return MetricKind::kDualQuat;
  if (name == "euler") return MetricKind::kEuler;
  if (name == "matrix") return MetricKind::kMatrix;
  throw std::invalid_argument("unknown metric '" + name +
                              "' (expected dq, euler or matrix)");
}

const char* metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kDualQuat:
      return "dq";
    case MetricKind::kEuler:
      return "euler";
    case MetricKind::kMatrix:
      return "matrix";
  }
  throw std::invalid_argument("metric_name: bad MetricKind");
}

double pose_distance(MetricKind kind, const Pose& a, const Pose& b,
                     const MetricWeights& w) {
  switch (kind) {
    case MetricKind::kDualQuat:
      return dq_pose_distance(a, b);
    case MetricKind::kEuler:
      return euler_distance(a, b, w);
    case MetricKind::kMatrix:
      return matrix_distance(a, b, w);
  }
  throw std::invalid_argument("pose_distance: bad MetricKind");
}

double rotation_term(MetricKind kind, const Pose& a, const Pose& b,
                     const MetricWeights& w) {
  switch (kind) {
    case MetricKind::kDualQuat:
      return dq_pose_rotation_distance(a, b);
    case MetricKind::kEuler: {
      w.validate();
      const Eigen::Vector3d de = a.euler_xyz() - b.euler_xyz();
      const Eigen::Vector3d wrapped{wrap_angle(de.x()), wrap_angle(de.y()),
                                    wrap_angle(de.z())};
      return w.mu * wrapped.norm();
    }
    case MetricKind::kMatrix:
      w.validate();
      return w.beta * matrix_angle(a, b);
  }
  throw std::invalid_argument("rotation_term: bad MetricKind");
}

MetricFn make_metric(MetricKind kind, const MetricWeights& w) {
  w.validate();
  return [kind, w](const Pose& a, const Pose& b) {
    return pose_distance(kind, a, b, w);
  };
}

}  // namespace handover
