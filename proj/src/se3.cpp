#include "relact/se3.hpp"

#include <cmath>

#include "relact/error.hpp"

namespace relact {

namespace {

bool all_finite(const Mat3& m) { return m.allFinite(); }

Mat3 gram_schmidt(const Vec3& a, const Vec3& b) {
  const double na = a.norm();
  if (!(na > kDegeneracyThreshold)) {
    throw Error(ErrorCode::DegenerateInput, "first column has near-zero norm");
  }
  const Vec3 c1 = a / na;
  const Vec3 b_orth = b - c1.dot(b) * c1;
  const double nb = b_orth.norm();
  if (!(nb > kDegeneracyThreshold)) {
    throw Error(ErrorCode::DegenerateInput,
                "second column is collinear with the first or zero");
  }
  const Vec3 c2 = b_orth / nb;
  Mat3 m;
  m.col(0) = c1;
  m.col(1) = c2;
  m.col(2) = c1.cross(c2);
  return m;
}

}  // namespace

double orthonormality_error(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Rotation3::Rotation3(const Mat3& m) : m_(m) {
  if (!all_finite(m)) throw Error(ErrorCode::NonFinite, "rotation has non-finite entries");
  const double err = orthonormality_error(m);
  const double det = m.determinant();
  if (err <= kConstructionTolerance && std::abs(det - 1.0) <= kConstructionTolerance) {
    return;
  }
  if (err <= kReorthonormalizeLimit && det > 0.0) {
    m_ = gram_schmidt(m.col(0), m.col(1));
    return;
  }
  throw Error(ErrorCode::NonOrthonormal,
              "orthonormality error " + std::to_string(err) + ", det " + std::to_string(det));
}

Rotation3 Rotation3::about_axis(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > kDegeneracyThreshold)) throw Error(ErrorCode::DegenerateInput, "zero rotation axis");
  const Vec3 u = axis / n;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  Mat3 m;
  m << t * u.x() * u.x() + c, t * u.x() * u.y() - s * u.z(), t * u.x() * u.z() + s * u.y(),
      t * u.x() * u.y() + s * u.z(), t * u.y() * u.y() + c, t * u.y() * u.z() - s * u.x(),
      t * u.x() * u.z() - s * u.y(), t * u.y() * u.z() + s * u.x(), t * u.z() * u.z() + c;
  return Rotation3(m, Trusted{});
}

Pose::Pose(const Vec3& p, const Rotation3& r) : p_(p), r_(r) {
  if (!p.allFinite()) throw Error(ErrorCode::NonFinite, "translation has non-finite entries");
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.p() + a.R() * b.p(), a.R() * b.R());
}

Pose inverse(const Pose& g) {
  const Rotation3 rt = g.R().transpose();
  return Pose(-(rt * g.p()), rt);
}

Pose subtract_se3(const Pose& current, const Pose& desired) {
  const Rotation3 rt = current.R().transpose();
  return Pose(rt * (desired.p() - current.p()), rt * desired.R());
}

HybridDelta subtract_hybrid(const Pose& current, const Pose& desired) {
  return HybridDelta{desired.p() - current.p(), current.R().transpose() * desired.R()};
}

HybridDelta hybrid_identity() { return HybridDelta{}; }

Pose apply_hybrid(const Pose& current, const HybridDelta& delta) {
  return Pose(current.p() + delta.dp, current.R() * delta.dR);
}

Rot6D rot_to_6d(const Rotation3& r) {
  const Mat3& m = r.matrix();
  return Rot6D{{m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1)}};
}

Rotation3 sixd_to_rot(const Rot6D& v) {
  const Vec3 a(v.v[0], v.v[1], v.v[2]);
  const Vec3 b(v.v[3], v.v[4], v.v[5]);
  if (!a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::NonFinite, "6D encoding has non-finite entries");
  }
  return Rotation3(gram_schmidt(a, b));
}

double rmse(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " points");
  }
  if (a.empty()) throw Error(ErrorCode::EmptyPath, "rmse of empty paths");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double max_abs_diff(const Rotation3& a, const Rotation3& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Pose& a, const Pose& b) {
  return std::max((a.p() - b.p()).cwiseAbs().maxCoeff(), max_abs_diff(a.R(), b.R()));
}

}  // namespace relact
