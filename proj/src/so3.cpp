#include "beamtie/so3.hpp"

#include <sstream>

namespace beamtie {

void check_rotation(const Mat3& lambda, double tol) {
  const double orth = (lambda.transpose() * lambda - Mat3::Identity()).norm();
  const double det = lambda.determinant();
  if (!(orth <= tol) || !(det > 0.0)) {
    std::ostringstream os;
    os << "invalid rotation: |L^T L - I| = " << orth << ", det = " << det;
    throw InvalidRotation(os.str());
  }
}

Triad exp_map(const RotationVector& psi) { return value(exp_map(Vec3T<double>(psi))); }

RotationVector rv(const Triad& lambda) { return value(rv(Mat3T<double>(lambda))); }

RotationVector relative_rotation(const Triad& lambda1, const Triad& lambda2) {
  return rv(Triad(lambda2 * lambda1.transpose()));
}

Triad geodesic_interpolate(const Triad& lambda1, const Triad& lambda2, double t) {
  return value(geodesic_interpolate(Mat3T<double>(lambda1), Mat3T<double>(lambda2), t));
}

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return s;
}

Triad smallest_rotation_from_e1(const Vec3& d) {
  const Vec3 e1 = Vec3::UnitX();
  const Vec3 u = d.normalized();
  const Vec3 axis = e1.cross(u);
  const double s = axis.norm();
  const double c = e1.dot(u);
  if (s < 1e-14) {
    if (c > 0.0) return Mat3::Identity();
    return exp_map(RotationVector(0.0, 0.0, std::numbers::pi));
  }
  return exp_map(RotationVector(axis / s * std::atan2(s, c)));
}

}  // namespace beamtie
