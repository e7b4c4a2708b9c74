#pragma once

// Fixed-size 3-vectors and 3x3 matrices over an arbitrary scalar type, so the
// same kinematics code runs on double and on dual numbers.

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "beamtie/autodiff.hpp"

namespace beamtie {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

template <class T>
struct Vec3T {
  std::array<T, 3> v{};

  Vec3T() = default;
  Vec3T(T x, T y, T z) : v{x, y, z} {}
  explicit Vec3T(const Vec3& e) requires(!std::is_same_v<T, double>)
      : v{T(e[0]), T(e[1]), T(e[2])} {}
  explicit Vec3T(const Vec3& e) requires(std::is_same_v<T, double>)
      : v{e[0], e[1], e[2]} {}

  T& operator[](int i) { return v[i]; }
  const T& operator[](int i) const { return v[i]; }

  Vec3T& operator+=(const Vec3T& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec3T& operator-=(const Vec3T& o) {
    for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  Vec3T& operator*=(const T& s) {
    for (int i = 0; i < 3; ++i) v[i] *= s;
    return *this;
  }
};

template <class T>
Vec3T<T> operator+(Vec3T<T> a, const Vec3T<T>& b) {
  a += b;
  return a;
}
template <class T>
Vec3T<T> operator-(Vec3T<T> a, const Vec3T<T>& b) {
  a -= b;
  return a;
}
template <class T>
Vec3T<T> operator-(const Vec3T<T>& a) {
  return Vec3T<T>(-a[0], -a[1], -a[2]);
}
template <class T>
Vec3T<T> operator*(const T& s, Vec3T<T> a) {
  a *= s;
  return a;
}
template <class T>
Vec3T<T> operator*(Vec3T<T> a, const T& s) {
  a *= s;
  return a;
}
template <class T>
  requires(!std::is_same_v<T, double>)
Vec3T<T> operator*(double s, Vec3T<T> a) {
  for (int i = 0; i < 3; ++i) a[i] *= s;
  return a;
}

template <class T>
T dot(const Vec3T<T>& a, const Vec3T<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
  return Vec3T<T>(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                  a[0] * b[1] - a[1] * b[0]);
}

template <class T>
T norm(const Vec3T<T>& a) {
  using std::sqrt;
  using ad::sqrt;
  return sqrt(dot(a, a));
}

template <class T>
Vec3T<T> normalized(const Vec3T<T>& a) {
  const T inv = T(1.0) / norm(a);
  return a * inv;
}

/// Row-major 3x3 matrix.
template <class T>
struct Mat3T {
  std::array<T, 9> m{};

  Mat3T() = default;
  explicit Mat3T(const Mat3& e) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[3 * i + j] = T(e(i, j));
  }

  static Mat3T identity() {
    Mat3T r;
    r(0, 0) = r(1, 1) = r(2, 2) = T(1.0);
    return r;
  }

  static Mat3T from_columns(const Vec3T<T>& c0, const Vec3T<T>& c1, const Vec3T<T>& c2) {
    Mat3T r;
    for (int i = 0; i < 3; ++i) {
      r(i, 0) = c0[i];
      r(i, 1) = c1[i];
      r(i, 2) = c2[i];
    }
    return r;
  }

  T& operator()(int i, int j) { return m[3 * i + j]; }
  const T& operator()(int i, int j) const { return m[3 * i + j]; }

  Vec3T<T> col(int j) const { return Vec3T<T>(m[j], m[3 + j], m[6 + j]); }

  Mat3T transpose() const {
    Mat3T r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  T trace() const { return m[0] + m[4] + m[8]; }

  Mat3T& operator+=(const Mat3T& o) {
    for (int k = 0; k < 9; ++k) m[k] += o.m[k];
    return *this;
  }
  Mat3T& operator*=(const T& s) {
    for (int k = 0; k < 9; ++k) m[k] *= s;
    return *this;
  }
};

template <class T>
Mat3T<T> operator+(Mat3T<T> a, const Mat3T<T>& b) {
  a += b;
  return a;
}

template <class T>
Mat3T<T> operator*(const Mat3T<T>& a, const Mat3T<T>& b) {
  Mat3T<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s = a(i, 0) * b(0, j);
      s += a(i, 1) * b(1, j);
      s += a(i, 2) * b(2, j);
      r(i, j) = s;
    }
  return r;
}

/// Product with a constant (double) right factor.
template <class T>
  requires(!std::is_same_v<T, double>)
Mat3T<T> operator*(const Mat3T<T>& a, const Mat3& b) {
  Mat3T<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s = a(i, 0) * b(0, j);
      s += a(i, 1) * b(1, j);
      s += a(i, 2) * b(2, j);
      r(i, j) = s;
    }
  return r;
}

template <class T>
Vec3T<T> operator*(const Mat3T<T>& a, const Vec3T<T>& x) {
  Vec3T<T> r;
  for (int i = 0; i < 3; ++i) {
    T s = a(i, 0) * x[0];
    s += a(i, 1) * x[1];
    s += a(i, 2) * x[2];
    r[i] = s;
  }
  return r;
}

template <class T>
Mat3T<T> operator*(const T& s, Mat3T<T> a) {
  a *= s;
  return a;
}

template <class T>
Mat3T<T> skew(const Vec3T<T>& a) {
  Mat3T<T> r;
  r(0, 1) = -a[2];
  r(0, 2) = a[1];
  r(1, 0) = a[2];
  r(1, 2) = -a[0];
  r(2, 0) = -a[1];
  r(2, 1) = a[0];
  return r;
}

inline double scalar_value(double x) { return x; }
template <ad::DualNumber T>
double scalar_value(const T& x) {
  return x.value();
}

template <class T>
Vec3 value(const Vec3T<T>& a) {
  return Vec3(scalar_value(a[0]), scalar_value(a[1]), scalar_value(a[2]));
}

template <class T>
Mat3 value(const Mat3T<T>& a) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = scalar_value(a(i, j));
  return r;
}

inline Vec3T<double> to_small(const Vec3& a) { return Vec3T<double>(a); }

}  // namespace beamtie
