#pragma once

#include <functional>
#include <string>

#include "handover/pose.hpp"

namespace handover {

// Scale factors blending translation (meters) and rotation (radians) into a
// single distance. psi weighs translation in the Euler and matrix metrics;
// mu weighs the wrapped Euler residual, beta the rotation-matrix angle.
struct MetricWeights {
  double psi = 2.1;
  double mu = 0.32;
  double beta = 0.32;

  // Throws std::invalid_argument unless all weights are strictly positive.
  void validate() const;
};

// d = psi*|t1 - t2| + mu*|wrap(e1 - e2)| with the Euler residual wrapped
// per component to (-pi, pi]. Not a true metric: representation jumps near
// the pitch singularity can score nearly-identical rotations far apart.
double euler_distance(const Pose& a, const Pose& b,
                      const MetricWeights& w = {});

// Geodesic rotation angle in [0, pi]: acos((trace(R1^T R2) - 1) / 2) with
// the argument clamped to [-1, 1].
double matrix_angle(const Pose& a, const Pose& b);

// d = psi*|t1 - t2| + beta*matrix_angle.
double matrix_distance(const Pose& a, const Pose& b,
                       const MetricWeights& w = {});

// Dual-quaternion distance between poses (see dq_distance): 8-component
// norm of the relative transform minus identity.
double dq_pose_distance(const Pose& a, const Pose& b);

// Rotation-only part of the dual-quaternion distance: 2*|sin(theta/4)| for
// a rotation gap theta.
double dq_pose_rotation_distance(const Pose& a, const Pose& b);

double translation_distance(const Pose& a, const Pose& b);

enum class MetricKind { kDualQuat, kEuler, kMatrix };

MetricKind metric_from_string(const std::string& name);
const char* metric_name(MetricKind kind);

// Full distance under the selected metric.
double pose_distance(MetricKind kind, const Pose& a, const Pose& b,
                     const MetricWeights& w = {});

// Rotation term of the selected metric: the dual-quaternion primary-part
// norm, mu*|wrap(de)|, or beta*theta respectively.
double rotation_term(MetricKind kind, const Pose& a, const Pose& b,
                     const MetricWeights& w = {});

using MetricFn = std::function<double(const Pose&, const Pose&)>;

MetricFn make_metric(MetricKind kind, const MetricWeights& w = {});

}  // namespace handover
