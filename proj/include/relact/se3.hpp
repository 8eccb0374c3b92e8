#pragma once

#include <array>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace relact {

// Positions in millimeters, angles in radians.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kConstructionTolerance = 1e-9;
inline constexpr double kReorthonormalizeLimit = 1e-6;
inline constexpr double kDegeneracyThreshold = 1e-9;

/// Max absolute elementwise deviation of m^T m from the identity.
double orthonormality_error(const Mat3& m);

/// A proper rotation stored as a full 3x3 matrix.
///
/// Construction accepts matrices within 1e-9 of orthonormal as-is, repairs
/// drift up to 1e-6 with Gram-Schmidt, and throws NonOrthonormal beyond that
/// or when det < 0.
class Rotation3 {
 public:
  Rotation3() : m_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& m);

  static Rotation3 identity() { return {}; }
  static Rotation3 about_axis(const Vec3& axis, double angle);
  static Rotation3 rot_x(double angle) { return about_axis(Vec3::UnitX(), angle); }
  static Rotation3 rot_y(double angle) { return about_axis(Vec3::UnitY(), angle); }
  static Rotation3 rot_z(double angle) { return about_axis(Vec3::UnitZ(), angle); }

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation3 transpose() const { return Rotation3(m_.transpose(), Trusted{}); }
  Rotation3 operator*(const Rotation3& other) const {
    return Rotation3(m_ * other.m_, Trusted{});
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  struct Trusted {};
  Rotation3(const Mat3& m, Trusted) : m_(m) {}

  Mat3 m_;
};

/// Rigid transform g = (p, R): x -> R x + p.
class Pose {
 public:
  Pose() : p_(Vec3::Zero()) {}
  Pose(const Vec3& p, const Rotation3& r);

  static Pose identity() { return {}; }
  static Pose translation(const Vec3& p) { return {p, Rotation3{}}; }
  static Pose translation(double x, double y, double z) { return translation(Vec3(x, y, z)); }
  static Pose rotation(const Rotation3& r) { return {Vec3::Zero(), r}; }

  const Vec3& p() const { return p_; }
  const Rotation3& R() const { return r_; }

  Vec3 operator*(const Vec3& point) const { return r_ * point + p_; }

 private:
  Vec3 p_;
  Rotation3 r_;
};

/// Translation delta in the parent frame paired with a rotation delta in the
/// current end-effector frame.
struct HybridDelta {
  Vec3 dp = Vec3::Zero();
  Rotation3 dR;
};

/// First two rotation columns, column 1 then column 2. May be non-orthonormal.
struct Rot6D {
  std::array<double, 6> v{};
};

Pose compose(const Pose& a, const Pose& b);
inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }
Pose inverse(const Pose& g);

/// inverse(current) * desired, so compose(current, result) == desired.
Pose subtract_se3(const Pose& current, const Pose& desired);
/// (desired.p - current.p, current.R^T desired.R).
HybridDelta subtract_hybrid(const Pose& current, const Pose& desired);
HybridDelta hybrid_identity();
Pose apply_hybrid(const Pose& current, const HybridDelta& delta);

Rot6D rot_to_6d(const Rotation3& r);
/// Gram-Schmidt on the two columns plus a cross product. Throws DegenerateInput
/// when either normalization denominator is <= 1e-9.
Rotation3 sixd_to_rot(const Rot6D& v);

/// Root-mean-square Euclidean distance between corresponding points.
double rmse(std::span<const Vec3> a, std::span<const Vec3> b);

/// Max absolute elementwise difference of two poses (translation and matrix).
double max_abs_diff(const Pose& a, const Pose& b);
double max_abs_diff(const Rotation3& a, const Rotation3& b);

}  // namespace relact
