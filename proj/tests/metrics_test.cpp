#include "handover/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "handover/pose.hpp"
#include "handover/rng.hpp"
#include "test_util.hpp"

namespace handover {
namespace {

using test::random_pose;
using test::random_unit_quat;
using test::random_vec;
using test::same_rotation;

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-9;
constexpr int kSweep = 1000;

TEST(AngleTest, WrapAngleMapsToHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap_angle(2.0 * kPi), 0.0, 1e-15);
  EXPECT_NEAR(wrap_angle(-7.0 * kPi), kPi, 1e-12);
  Rng rng(31);
  for (int i = 0; i < kSweep; ++i) {
    const double w = wrap_angle(rng.uniform(-50.0, 50.0));
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
  }
}

TEST(ConvertTest, IdentityRotationViews) {
  const Pose p;
  EXPECT_DOUBLE_EQ(p.euler_xyz().norm(), 0.0);
  EXPECT_LT((p.matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
            kTol);
}

TEST(ConvertTest, SingleAxisRollClosedForm) {
  const Quaternion q = euler_xyz_to_quat({kPi / 2.0, 0.0, 0.0});
  EXPECT_NEAR(q.w, 0.7071067811865476, kTol);
  EXPECT_NEAR(q.x, 0.7071067811865476, kTol);
  EXPECT_NEAR(q.y, 0.0, kTol);
  EXPECT_NEAR(q.z, 0.0, kTol);
}

TEST(ConvertTest, EulerMatrixQuatViewsAgreeOnRandomRotations) {
  Rng rng(32);
  for (int i = 0; i < kSweep; ++i) {
    const Quaternion q = random_unit_quat(rng);
    const Eigen::Matrix3d r = quat_to_matrix(q);
    const Eigen::Vector3d e = quat_to_euler_xyz(q);
    const Eigen::Vector3d v = random_vec(rng);
    EXPECT_LT((r * v - q.rotate(v)).norm(), kTol);
    EXPECT_LT((euler_xyz_to_matrix(e) * v - r * v).norm(), kTol);
  }
}

TEST(ConvertTest, MatrixRoundTripPreservesRotation) {
  Rng rng(33);
  for (int i = 0; i < kSweep; ++i) {
    const Quaternion q = random_unit_quat(rng);
    const Quaternion back = matrix_to_quat(quat_to_matrix(q));
    EXPECT_TRUE(same_rotation(q, back));
    EXPECT_NEAR(back.norm(), 1.0, kTol);
  }
}

TEST(ConvertTest, EulerExtractionUsesCanonicalChart) {
  Rng rng(34);
  for (int i = 0; i < kSweep; ++i) {
    const Eigen::Vector3d e = quat_to_euler_xyz(random_unit_quat(rng));
    for (int k = 0; k < 3; ++k) {
      EXPECT_GT(e[k], -kPi - 1e-12);
      EXPECT_LE(e[k], kPi + 1e-12);
    }
    EXPECT_LE(std::abs(e[1]), kPi / 2.0 + 1e-12);  // pitch chart
  }
}

TEST(ConvertTest, RotationMatricesAreOrthonormal) {
  Rng rng(35);
  for (int i = 0; i < kSweep; ++i) {
    const Eigen::Matrix3d r = random_pose(rng).matrix();
    EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity())
                  .cwiseAbs()
                  .maxCoeff(),
              kTol);
    EXPECT_NEAR(r.determinant(), 1.0, kTol);
  }
}

TEST(ConvertTest, GimbalAdjacentRoundTripKeepsRotationAction) {
  // pitch within 1e-9 of the chart edge: the angle triple is ill-
  // conditioned but the rotation it encodes must survive the round trip.
  const Eigen::Vector3d e{0.4, kPi / 2.0 - 1e-9, -1.1};
  const Quaternion q = euler_xyz_to_quat(e);
  const Quaternion back = euler_xyz_to_quat(quat_to_euler_xyz(q));
  EXPECT_TRUE(same_rotation(q, back, 1e-7));
}

TEST(ConvertTest, ExactGimbalPitchRoundTrips) {
  for (double pitch : {kPi / 2.0, -kPi / 2.0}) {
    const Eigen::Vector3d e{0.9, pitch, 0.3};
    const Quaternion q = euler_xyz_to_quat(e);
    const Eigen::Vector3d out = quat_to_euler_xyz(q);
    EXPECT_DOUBLE_EQ(out[0], 0.0);  // roll folded into yaw at the pole
    const Quaternion back = euler_xyz_to_quat(out);
    EXPECT_TRUE(same_rotation(q, back, 1e-7));
  }
}

TEST(PoseTest, ComposeChainsAndInverseCancels) {
  Rng rng(36);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const Eigen::Vector3d x = random_vec(rng);
    EXPECT_LT((compose(a, b).apply(x) - a.apply(b.apply(x))).norm(), kTol);
    const Pose id = compose(a, inverse(a));
    EXPECT_LT(id.translation.norm(), kTol);
    EXPECT_TRUE(same_rotation(id.rotation, Quaternion::identity()));
  }
}

TEST(PoseTest, DualQuaternionRoundTrip) {
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const Pose p = random_pose(rng);
    const Pose back = pose_from_dq(pose_to_dq(p));
    EXPECT_LT((back.translation - p.translation).norm(), kTol);
    EXPECT_TRUE(same_rotation(back.rotation, p.rotation));
  }
}

TEST(EulerDistanceTest, ZeroForEqualPoses) {
  Rng rng(38);
  for (int i = 0; i < 100; ++i) {
    const Pose p = random_pose(rng);
    EXPECT_NEAR(euler_distance(p, p), 0.0, kTol);
  }
}

TEST(EulerDistanceTest, PureTranslationScalesWithPsi) {
  const Pose a{{0.0, 0.0, 0.0}, Quaternion::identity()};
  const Pose b{{1.0, 0.0, 0.0}, Quaternion::identity()};
  EXPECT_NEAR(euler_distance(a, b), 2.1, kTol);
}

TEST(EulerDistanceTest, QuarterTurnYawScalesWithMu) {
  const Pose a{{0.2, 0.1, -0.3}, Quaternion::identity()};
  const Pose b{{0.2, 0.1, -0.3}, euler_xyz_to_quat({0.0, 0.0, kPi / 2.0})};
  EXPECT_NEAR(euler_distance(a, b), 0.5026548245743669, kTol);
}

TEST(EulerDistanceTest, WrapsDifferencesAcrossTheSeam) {
  // Yaw of +/- (pi - 0.01) straddles the seam; the raw difference is close
  // to 2*pi but the wrapped gap is only 0.02.
  const Pose a{{0.0, 0.0, 0.0}, euler_xyz_to_quat({0.0, 0.0, kPi - 0.01})};
  const Pose b{{0.0, 0.0, 0.0}, euler_xyz_to_quat({0.0, 0.0, -(kPi - 0.01)})};
  EXPECT_NEAR(euler_distance(a, b), 0.32 * 0.02, 1e-9);
}

TEST(MatrixAngleTest, ZeroForEqualRotations) {
  Rng rng(39);
  for (int i = 0; i < kSweep; ++i) {
    const Pose p = random_pose(rng);
    const double theta = matrix_angle(p, p);
    EXPECT_TRUE(std::isfinite(theta));
    EXPECT_NEAR(theta, 0.0, 1e-7);
  }
}

TEST(MatrixAngleTest, HalfTurnAboutAnyAxisIsPi) {
  Rng rng(40);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d axis = rng.unit_vector();
    const Pose a{random_vec(rng), Quaternion::identity()};
    const Pose b{random_vec(rng), Quaternion::from_axis_angle(axis, kPi)};
    const double theta = matrix_angle(a, b);
    EXPECT_TRUE(std::isfinite(theta));
    EXPECT_NEAR(theta, kPi, 1e-6);
  }
}

TEST(MatrixAngleTest, InvertsRotationDistanceClosedForm) {
  Rng rng(41);
  for (int i = 0; i < kSweep; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const double theta = matrix_angle(a, b);
    const double d_rot = dq_pose_rotation_distance(a, b);
    EXPECT_NEAR(theta, 4.0 * std::asin(std::min(1.0, d_rot / 2.0)), 1e-7);
  }
}

TEST(MatrixDistanceTest, FrozenMixedExample) {
  const Pose a{{0.0, 0.0, 0.0}, Quaternion::identity()};
  const Pose b{{0.0, 0.0, 0.1},
               Quaternion::from_axis_angle({1.0, 0.0, 0.0}, kPi)};
  EXPECT_NEAR(matrix_distance(a, b), 1.2153096491487339, 1e-6);
}

TEST(MatrixDistanceTest, PureRotationIsLinearInAngle) {
  for (double theta = 0.0; theta <= kPi + 1e-9; theta += kPi / 16.0) {
    const Pose a{{0.0, 0.0, 0.0}, Quaternion::identity()};
    const Pose b{{0.0, 0.0, 0.0},
                 Quaternion::from_axis_angle({0.0, 1.0, 0.0}, theta)};
    EXPECT_NEAR(matrix_distance(a, b), 0.32 * theta, 1e-6);
  }
}

TEST(MetricLawsTest, NonNegativityIdentitySymmetryAllMetrics) {
  Rng rng(42);
  const MetricKind kinds[3] = {MetricKind::kDualQuat, MetricKind::kEuler,
                               MetricKind::kMatrix};
  for (int i = 0; i < kSweep; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    for (MetricKind kind : kinds) {
      const double dab = pose_distance(kind, a, b);
      const double dba = pose_distance(kind, b, a);
      EXPECT_GE(dab, 0.0);
      EXPECT_NEAR(dab, dba, kTol);
      EXPECT_NEAR(pose_distance(kind, a, a), 0.0, kTol);
    }
  }
}

TEST(MetricLawsTest, TriangleInequalityMatrixMetric) {
  Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const Pose c = random_pose(rng);
    const double ab = matrix_distance(a, b);
    const double bc = matrix_distance(b, c);
    const double ac = matrix_distance(a, c);
    EXPECT_LE(ac, ab + bc + kTol);
  }
}

TEST(MetricLawsTest, TriangleInequalityEulerMetricSingleChart) {
  // Only within one Euler chart: small rotations keep every extraction on
  // the same sheet, where the metric is a plain norm on (t, e) residuals.
  Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    auto small_pose = [&rng]() {
      return Pose{random_vec(rng, 0.5),
                  euler_xyz_to_quat(random_vec(rng, 0.3))};
    };
    const Pose a = small_pose();
    const Pose b = small_pose();
    const Pose c = small_pose();
    const double ab = euler_distance(a, b);
    const double bc = euler_distance(b, c);
    const double ac = euler_distance(a, c);
    EXPECT_LE(ac, ab + bc + kTol);
  }
}

TEST(MetricLawsTest, GimbalDiscontinuityWitness) {
  // Two rotations 2e-4 rad apart that straddle the pitch singularity: the
  // Euler metric tears (the extraction switches charts and both roll and
  // yaw jump by pi) while the chart-free metrics stay tiny.
  const Eigen::Vector3d t{0.3, -0.2, 0.5};
  const Pose a{t, euler_xyz_to_quat({0.0, kPi / 2.0 - 1e-4, 0.0})};
  const Pose b{t, euler_xyz_to_quat({0.0, kPi / 2.0 + 1e-4, 0.0})};
  const double de = euler_distance(a, b);
  EXPECT_GT(de, 0.5);
  EXPECT_NEAR(de, 1.4217225402106775, 1e-9);  // 0.32 * pi * sqrt(2)
  EXPECT_LT(dq_pose_distance(a, b), 1e-3);
  EXPECT_LT(matrix_distance(a, b), 1e-3);
}

TEST(MetricLawsTest, MatrixAngleNeverNaNNearTraceBoundaries) {
  Rng rng(45);
  for (int i = 0; i < kSweep; ++i) {
    const Pose p = random_pose(rng);
    // Identical and antipodal rotations put the acos argument exactly at
    // the +/-1 boundaries where unclamped overshoot would produce NaN.
    const Pose flipped{p.translation,
                       quat_mul(Quaternion::from_axis_angle(
                                    rng.unit_vector(), kPi),
                                p.rotation)};
    EXPECT_TRUE(std::isfinite(matrix_angle(p, p)));
    EXPECT_TRUE(std::isfinite(matrix_angle(p, flipped)));
  }
}

TEST(MetricPlumbingTest, NameParsingRoundTrip) {
  EXPECT_EQ(metric_from_string("dq"), MetricKind::kDualQuat);
  EXPECT_EQ(metric_from_string("euler"), MetricKind::kEuler);
  EXPECT_EQ(metric_from_string("matrix"), MetricKind::kMatrix);
  EXPECT_STREQ(metric_name(MetricKind::kDualQuat), "dq");
  EXPECT_STREQ(metric_name(MetricKind::kEuler), "euler");
  EXPECT_STREQ(metric_name(MetricKind::kMatrix), "matrix");
  EXPECT_THROW(metric_from_string("quaternion"), std::invalid_argument);
}

TEST(MetricPlumbingTest, PoseDistanceDispatchesToBackends) {
  Rng rng(46);
  const MetricWeights w;
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    EXPECT_DOUBLE_EQ(pose_distance(MetricKind::kDualQuat, a, b),
                     dq_pose_distance(a, b));
    EXPECT_DOUBLE_EQ(pose_distance(MetricKind::kEuler, a, b, w),
                     euler_distance(a, b, w));
    EXPECT_DOUBLE_EQ(pose_distance(MetricKind::kMatrix, a, b, w),
                     matrix_distance(a, b, w));
    const MetricFn fn = make_metric(MetricKind::kMatrix, w);
    EXPECT_DOUBLE_EQ(fn(a, b), matrix_distance(a, b, w));
  }
}

TEST(MetricPlumbingTest, RotationTermMatchesEachBackend) {
  Rng rng(47);
  const MetricWeights w;
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    EXPECT_DOUBLE_EQ(rotation_term(MetricKind::kDualQuat, a, b),
                     dq_pose_rotation_distance(a, b));
    EXPECT_NEAR(rotation_term(MetricKind::kMatrix, a, b, w),
                w.beta * matrix_angle(a, b), 1e-12);
    // The Euler rotation term plus the translation term rebuilds the full
    // Euler distance.
    EXPECT_NEAR(rotation_term(MetricKind::kEuler, a, b, w) +
                    w.psi * translation_distance(a, b),
                euler_distance(a, b, w), 1e-12);
  }
}

TEST(MetricPlumbingTest, WeightsMustBeStrictlyPositive) {
  MetricWeights w;
  w.psi = 0.0;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w.psi = 2.1;
  w.mu = -0.1;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w.mu = 0.32;
  w.beta = 0.0;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w.beta = 0.32;
  EXPECT_NO_THROW(w.validate());
}

}  // namespace
}  // namespace handover
