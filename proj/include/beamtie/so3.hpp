#pragma once

// Finite rotations: Rodrigues exponential map, Spurrier extraction of the
// rotation vector, relative rotations and geodesic triad interpolation.
// The templated kernels accept double as well as dual numbers.

#include <cmath>
#include <numbers>
#include <string>

#include "beamtie/error.hpp"
#include "beamtie/small_matrix.hpp"

namespace beamtie {

using RotationVector = Vec3;
using Triad = Mat3;

namespace so3_detail {

template <class T>
T tsqrt(const T& x) {
  using std::sqrt;
  using ad::sqrt;
  return sqrt(x);
}

template <class T>
T tsin(const T& x) {
  using std::sin;
  using ad::sin;
  return sin(x);
}

template <class T>
T tcos(const T& x) {
  using std::cos;
  using ad::cos;
  return cos(x);
}

template <class T>
T tatan(const T& x) {
  using std::atan;
  using ad::atan;
  return atan(x);
}

}  // namespace so3_detail

/// I + sinψ S(e) + (1 − cosψ) S(e)², written with ψ-scaled coefficients.
template <class T>
Mat3T<T> exp_map(const Vec3T<T>& psi) {
  using namespace so3_detail;
  const T y = dot(psi, psi);
  T a, b;
  if (scalar_value(y) < 1e-12) {
    a = 1.0 - y / 6.0 + y * y / 120.0 - y * y * y / 5040.0;
    b = 0.5 - y / 24.0 + y * y / 720.0 - y * y * y / 40320.0;
  } else {
    const T angle = tsqrt(y);
    a = tsin(angle) / angle;
    b = (1.0 - tcos(angle)) / y;
  }
  Mat3T<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T v = b * psi[i] * psi[j];
      if (i == j) v += 1.0 - b * y;
      r(i, j) = v;
    }
  r(0, 1) -= a * psi[2];
  r(0, 2) += a * psi[1];
  r(1, 0) += a * psi[2];
  r(1, 2) -= a * psi[0];
  r(2, 0) -= a * psi[1];
  r(2, 1) += a * psi[0];
  return r;
}

/// Checks ΛᵀΛ = I and det Λ > 0 on the values of a (possibly dual) matrix.
void check_rotation(const Mat3& lambda, double tol = 1e-8);

/// Rotation vector of a triad via Spurrier's quaternion extraction.
template <class T>
Vec3T<T> rv(const Mat3T<T>& lam) {
  using namespace so3_detail;
  check_rotation(value(lam));
  const T tr = lam.trace();
  const double trv = scalar_value(tr);
  int imax = -1;
  double best = trv;
  for (int i = 0; i < 3; ++i) {
    if (scalar_value(lam(i, i)) > best) {
      best = scalar_value(lam(i, i));
      imax = i;
    }
  }
  T q0;
  Vec3T<T> q;
  if (imax < 0) {
    q0 = 0.5 * tsqrt(1.0 + tr);
    const T s = 0.25 / q0;
    q[0] = (lam(2, 1) - lam(1, 2)) * s;
    q[1] = (lam(0, 2) - lam(2, 0)) * s;
    q[2] = (lam(1, 0) - lam(0, 1)) * s;
  } else {
    const int i = imax;
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    q[i] = tsqrt(0.5 * lam(i, i) + 0.25 * (1.0 - tr));
    const T s = 0.25 / q[i];
    q0 = (lam(k, j) - lam(j, k)) * s;
    q[j] = (lam(j, i) + lam(i, j)) * s;
    q[k] = (lam(k, i) + lam(i, k)) * s;
  }
  if (scalar_value(q0) < 0.0) {
    q0 = -q0;
    q = -q;
  }
  const T y = dot(q, q);
  T h;
  if (scalar_value(y) < 1e-6) {
    h = 2.0 * (1.0 + y / 6.0 + 3.0 * y * y / 40.0 + 5.0 * y * y * y / 112.0);
  } else {
    const T n = tsqrt(y);
    h = 4.0 * tatan(n / (1.0 + q0)) / n;
  }
  return q * h;
}

/// rv(Λ2 Λ1ᵀ).
template <class T>
Vec3T<T> relative_rotation(const Mat3T<T>& lambda1, const Mat3T<T>& lambda2) {
  return rv(lambda2 * lambda1.transpose());
}

/// exp(t·relative_rotation(Λ1, Λ2)) Λ1.
template <class T>
Mat3T<T> geodesic_interpolate(const Mat3T<T>& lambda1, const Mat3T<T>& lambda2, double t) {
  const Vec3T<T> phi = relative_rotation(lambda1, lambda2);
  if (value(phi).norm() >= std::numbers::pi - 1e-6)
    throw InterpolationSingularity("geodesic interpolation: relative angle reaches pi");
  return exp_map(phi * T(t)) * lambda1;
}

Triad exp_map(const RotationVector& psi);
RotationVector rv(const Triad& lambda);
RotationVector relative_rotation(const Triad& lambda1, const Triad& lambda2);
Triad geodesic_interpolate(const Triad& lambda1, const Triad& lambda2, double t);

Mat3 skew(const Vec3& a);

/// Smallest rotation mapping e1 onto the unit vector d.
Triad smallest_rotation_from_e1(const Vec3& d);

}  // namespace beamtie
