#include "relact/se3.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "relact/error.hpp"
#include "test_support.hpp"

namespace relact {
namespace {

using testing::random_pose;
using testing::random_rotation;

constexpr double kTol = 1e-9;
constexpr double kOrthoTol = 1e-12;

void expect_error(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Rotation3Test, AcceptsExactRotationUnchanged) {
  const Mat3 m = Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  EXPECT_EQ(Rotation3(m).matrix(), m);
}

TEST(Rotation3Test, RepairsSmallDrift) {
  Mat3 m = Mat3::Identity();
  m(0, 1) = 5e-8;
  const Rotation3 r(m);
  EXPECT_LE(orthonormality_error(r.matrix()), kOrthoTol);
  EXPECT_NEAR(r.matrix().determinant(), 1.0, kOrthoTol);
}

TEST(Rotation3Test, RejectsLargeDriftAndReflections) {
  Mat3 drift = Mat3::Identity();
  drift(0, 1) = 1e-3;
  expect_error(ErrorCode::NonOrthonormal, [&] { Rotation3{drift}; });
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  expect_error(ErrorCode::NonOrthonormal, [&] { Rotation3{reflect}; });
  Mat3 nan = Mat3::Identity();
  nan(1, 1) = std::nan("");
  expect_error(ErrorCode::NonFinite, [&] { Rotation3{nan}; });
}

TEST(PoseTest, ComposeWithIdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const Pose g = random_pose(rng);
  EXPECT_LE(max_abs_diff(compose(Pose::identity(), g), g), 0.0);
  EXPECT_LE(max_abs_diff(compose(g, Pose::identity()), g), kTol);
}

TEST(PoseTest, PureTranslationsAdd) {
  const Pose g = compose(Pose::translation(1, 0, 0), Pose::translation(2, 0, 0));
  EXPECT_EQ(g.p(), Vec3(3, 0, 0));
  EXPECT_EQ(g.R().matrix(), Mat3::Identity());
}

TEST(PoseTest, InverseOfRotZ90IsRotZMinus90) {
  const Pose g = Pose::rotation(Rotation3::rot_z(std::numbers::pi / 2));
  const Pose expected = Pose::rotation(Rotation3::rot_z(-std::numbers::pi / 2));
  EXPECT_LE(max_abs_diff(inverse(g), expected), 1e-15);
  EXPECT_LE(max_abs_diff(inverse(Pose::identity()), Pose::identity()), 0.0);
}

TEST(PoseTest, GroupLawsOnRandomPoses) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    EXPECT_LE(max_abs_diff(compose(compose(a, b), c), compose(a, compose(b, c))), kTol);
    EXPECT_LE(max_abs_diff(compose(a, inverse(a)), Pose::identity()), kTol);
    EXPECT_LE(max_abs_diff(compose(inverse(a), a), Pose::identity()), kTol);
  }
}

TEST(PoseTest, ComposeMatchesHomogeneousMatrixProduct) {
  // Independent route: 4x4 homogeneous matrices.
  auto homogeneous = [](const Pose& g) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    h.topLeftCorner<3, 3>() = g.R().matrix();
    h.topRightCorner<3, 1>() = g.p();
    return h;
  };
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    const Eigen::Matrix4d expected = homogeneous(a) * homogeneous(b);
    EXPECT_LE((homogeneous(compose(a, b)) - expected).cwiseAbs().maxCoeff(), kTol);
    EXPECT_LE((homogeneous(inverse(a)) - homogeneous(a).inverse()).cwiseAbs().maxCoeff(), kTol);
  }
}

TEST(SubtractSe3Test, EdgeCases) {
  std::mt19937_64 rng(3);
  const Pose g = random_pose(rng);
  EXPECT_LE(max_abs_diff(subtract_se3(g, g), Pose::identity()), kTol);
  EXPECT_LE(max_abs_diff(subtract_se3(Pose::identity(), g), g), 0.0);
}

TEST(SubtractSe3Test, RoundTripAndLeftInvariance) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Pose g = random_pose(rng), desired = random_pose(rng), t = random_pose(rng);
    const Pose delta = subtract_se3(g, desired);
    EXPECT_LE(max_abs_diff(compose(g, delta), desired), kTol);
    EXPECT_LE(max_abs_diff(subtract_se3(t * g, t * desired), delta), 1e-12);
  }
}

TEST(SubtractHybridTest, EdgeCases) {
  std::mt19937_64 rng(9);
  const Pose g = random_pose(rng);
  const HybridDelta same = subtract_hybrid(g, g);
  EXPECT_LE(same.dp.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(max_abs_diff(same.dR, Rotation3{}), kTol);

  const Vec3 t(4, -2, 7);
  const HybridDelta pure = subtract_hybrid(Pose::identity(), Pose::translation(t));
  EXPECT_EQ(pure.dp, t);
  EXPECT_EQ(pure.dR.matrix(), Mat3::Identity());

  EXPECT_LE(max_abs_diff(apply_hybrid(g, hybrid_identity()), g), 0.0);
  EXPECT_LE(max_abs_diff(apply_hybrid(Pose::identity(), {t, Rotation3{}}), Pose::translation(t)), 0.0);
}

TEST(SubtractHybridTest, RoundTripAndFrameBehaviour) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Pose g = random_pose(rng), desired = random_pose(rng);
    const HybridDelta d = subtract_hybrid(g, desired);
    EXPECT_LE(max_abs_diff(apply_hybrid(g, d), desired), kTol);
    // dp is the parent-frame difference; dR is relative to the current frame.
    EXPECT_LE((d.dp - (desired.p() - g.p())).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((d.dR.matrix() - g.R().matrix().transpose() * desired.R().matrix()).cwiseAbs().maxCoeff(),
              1e-15);

    const Rotation3 q = random_rotation(rng);
    const Pose rot = Pose::rotation(q);
    const HybridDelta rotated = subtract_hybrid(rot * g, rot * desired);
    EXPECT_LE(max_abs_diff(rotated.dR, d.dR), 1e-12);
    EXPECT_LE((rotated.dp - q * d.dp).cwiseAbs().maxCoeff(), 1e-12);

    const Pose shift = Pose::translation(testing::random_vec(rng, 100.0));
    const HybridDelta shifted = subtract_hybrid(shift * g, shift * desired);
    EXPECT_LE((shifted.dp - d.dp).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(max_abs_diff(shifted.dR, d.dR), 0.0);
  }
}

TEST(Rot6dTest, Identity) {
  const Rot6D v = rot_to_6d(Rotation3{});
  EXPECT_EQ(v.v, (std::array<double, 6>{1, 0, 0, 0, 1, 0}));
  EXPECT_EQ(sixd_to_rot(v).matrix(), Mat3::Identity());
}

TEST(Rot6dTest, RotZ90Columns) {
  // Columns of rotZ(90): (0,1,0) and (-1,0,0).
  const Rot6D v = rot_to_6d(Rotation3::rot_z(std::numbers::pi / 2));
  const std::array<double, 6> expected{0, 1, 0, -1, 0, 0};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(v.v[i], expected[i], 1e-16);
}

TEST(Rot6dTest, ScaleIsNormalizedAway) {
  EXPECT_LE(max_abs_diff(sixd_to_rot(Rot6D{{2, 0, 0, 0, 3, 0}}), Rotation3{}), 0.0);
}

TEST(Rot6dTest, RoundTripOnRandomRotations) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Rotation3 r = random_rotation(rng);
    EXPECT_LE(max_abs_diff(sixd_to_rot(rot_to_6d(r)), r), kTol);
  }
}

TEST(Rot6dTest, PerturbedEncodingsDecodeOrthonormal) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  for (int i = 0; i < 1000; ++i) {
    Rot6D v = rot_to_6d(random_rotation(rng));
    for (double& x : v.v) x += noise(rng);
    const Mat3 m = sixd_to_rot(v).matrix();
    EXPECT_LE(orthonormality_error(m), kOrthoTol);
    EXPECT_NEAR(m.determinant(), 1.0, kOrthoTol);
  }
}

TEST(Rot6dTest, DegenerateEncodingsThrow) {
  expect_error(ErrorCode::DegenerateInput, [] { sixd_to_rot(Rot6D{{0, 0, 0, 0, 1, 0}}); });
  expect_error(ErrorCode::DegenerateInput, [] { sixd_to_rot(Rot6D{{1, 0, 0, 2, 0, 0}}); });
  expect_error(ErrorCode::DegenerateInput, [] { sixd_to_rot(Rot6D{{1, 0, 0, 0, 0, 0}}); });
}

TEST(RmseTest, HandComputedValues) {
  const std::vector<Vec3> origin{Vec3::Zero()};
  const std::vector<Vec3> p345{Vec3(3, 4, 0)};
  EXPECT_DOUBLE_EQ(rmse(origin, p345), 5.0);
  const std::vector<Vec3> a{Vec3::Zero(), Vec3::Zero()};
  const std::vector<Vec3> b{Vec3(1, 0, 0), Vec3(0, 7, 0)};
  EXPECT_DOUBLE_EQ(rmse(a, b), std::sqrt((1.0 + 49.0) / 2.0));
  EXPECT_DOUBLE_EQ(rmse(b, b), 0.0);
}

TEST(RmseTest, SymmetricAndNonnegative) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    std::vector<Vec3> a, b;
    for (int k = 0; k < 10; ++k) {
      a.push_back(testing::random_vec(rng, 50));
      b.push_back(testing::random_vec(rng, 50));
    }
    EXPECT_EQ(rmse(a, b), rmse(b, a));
    EXPECT_GT(rmse(a, b), 0.0);
  }
}

TEST(RmseTest, Errors) {
  const std::vector<Vec3> one{Vec3::Zero()};
  const std::vector<Vec3> two{Vec3::Zero(), Vec3::Zero()};
  const std::vector<Vec3> none;
  expect_error(ErrorCode::LengthMismatch, [&] { rmse(one, two); });
  expect_error(ErrorCode::EmptyPath, [&] { rmse(none, none); });
}

}  // namespace
}  // namespace relact
