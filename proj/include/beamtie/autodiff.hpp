#pragma once

// Forward-mode automatic differentiation with first- and second-order dual
// numbers. The number of active directions N is a compile-time constant chosen
// per call site (an element, a facet patch, a Gauss point kernel).

#include <array>
#include <utility>
#include <cmath>
#include <span>

#include <Eigen/Dense>

namespace beamtie::ad {

/// First-order dual number: value and gradient.
template <int N>
class Dual1 {
 public:
  static constexpr int kSize = N;

  Dual1() = default;
  Dual1(double value) : v_(value) {}  // NOLINT: implicit promotion of constants

  static Dual1 variable(double value, int index) {
    Dual1 d(value);
    d.g_[index] = 1.0;
    return d;
  }

  double value() const { return v_; }
  double grad(int i) const { return g_[i]; }
  double& grad(int i) { return g_[i]; }

  Eigen::VectorXd gradient() const {
    Eigen::VectorXd out(N);
    for (int i = 0; i < N; ++i) out[i] = g_[i];
    return out;
  }

  Dual1& operator+=(const Dual1& o) {
    v_ += o.v_;
    for (int i = 0; i < N; ++i) g_[i] += o.g_[i];
    return *this;
  }
  Dual1& operator-=(const Dual1& o) {
    v_ -= o.v_;
    for (int i = 0; i < N; ++i) g_[i] -= o.g_[i];
    return *this;
  }
  Dual1& operator*=(const Dual1& o) {
    for (int i = 0; i < N; ++i) g_[i] = g_[i] * o.v_ + v_ * o.g_[i];
    v_ *= o.v_;
    return *this;
  }
  Dual1& operator*=(double s) {
    v_ *= s;
    for (auto& x : g_) x *= s;
    return *this;
  }
  Dual1& operator/=(const Dual1& o) {
    const double inv = 1.0 / o.v_;
    v_ *= inv;
    for (int i = 0; i < N; ++i) g_[i] = (g_[i] - v_ * o.g_[i]) * inv;
    return *this;
  }
  Dual1 operator-() const {
    Dual1 d(*this);
    d *= -1.0;
    return d;
  }

  /// Applies a scalar function given its value and first two derivatives.
  Dual1 chain(double f, double df, double /*d2f*/) const {
    Dual1 d(f);
    for (int i = 0; i < N; ++i) d.g_[i] = df * g_[i];
    return d;
  }

 private:
  double v_ = 0.0;
  std::array<double, N> g_{};
};

/// Second-order dual number: value, gradient and packed symmetric Hessian.
template <int N>
class Dual2 {
 public:
  static constexpr int kSize = N;
  static constexpr int kPacked = N * (N + 1) / 2;

  Dual2() = default;
  Dual2(double value) : v_(value) {}  // NOLINT: implicit promotion of constants

  static Dual2 variable(double value, int index) {
    Dual2 d(value);
    d.g_[index] = 1.0;
    return d;
  }

  static constexpr int packed_index(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * N - i * (i - 1) / 2 + (j - i);
  }

  double value() const { return v_; }
  double grad(int i) const { return g_[i]; }
  double hess(int i, int j) const { return h_[packed_index(i, j)]; }

  Eigen::VectorXd gradient() const {
    Eigen::VectorXd out(N);
    for (int i = 0; i < N; ++i) out[i] = g_[i];
    return out;
  }

  Eigen::MatrixXd hessian() const {
    Eigen::MatrixXd out(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) out(i, j) = out(j, i) = h_[packed_index(i, j)];
    return out;
  }

  Dual2& operator+=(const Dual2& o) {
    v_ += o.v_;
    for (int i = 0; i < N; ++i) g_[i] += o.g_[i];
    for (int k = 0; k < kPacked; ++k) h_[k] += o.h_[k];
    return *this;
  }
  Dual2& operator-=(const Dual2& o) {
    v_ -= o.v_;
    for (int i = 0; i < N; ++i) g_[i] -= o.g_[i];
    for (int k = 0; k < kPacked; ++k) h_[k] -= o.h_[k];
    return *this;
  }
  Dual2& operator*=(double s) {
    v_ *= s;
    for (auto& x : g_) x *= s;
    for (auto& x : h_) x *= s;
    return *this;
  }
  Dual2& operator*=(const Dual2& o) {
    int k = 0;
    for (int i = 0; i < N; ++i) {
      const double gi = g_[i];
      const double ogi = o.g_[i];
      for (int j = i; j < N; ++j, ++k)
        h_[k] = h_[k] * o.v_ + v_ * o.h_[k] + gi * o.g_[j] + ogi * g_[j];
    }
    for (int i = 0; i < N; ++i) g_[i] = g_[i] * o.v_ + v_ * o.g_[i];
    v_ *= o.v_;
    return *this;
  }
  Dual2& operator/=(const Dual2& o) {
    *this *= o.chain(1.0 / o.v_, -1.0 / (o.v_ * o.v_), 2.0 / (o.v_ * o.v_ * o.v_));
    return *this;
  }
  Dual2 operator-() const {
    Dual2 d(*this);
    d *= -1.0;
    return d;
  }

  /// Applies a scalar function given its value and first two derivatives.
  Dual2 chain(double f, double df, double d2f) const {
    Dual2 d(f);
    for (int i = 0; i < N; ++i) d.g_[i] = df * g_[i];
    int k = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j, ++k) d.h_[k] = df * h_[k] + d2f * g_[i] * g_[j];
    return d;
  }

  /// Copies this number into a larger space, shifting its directions by offset.
  template <int M>
  Dual2<M> embed(int offset) const {
    static_assert(M >= N);
    Dual2<M> d(v_);
    for (int i = 0; i < N; ++i) {
      d.raw_grad(i + offset) = g_[i];
      for (int j = i; j < N; ++j)
        d.raw_hess(i + offset, j + offset) = h_[packed_index(i, j)];
    }
    return d;
  }

  /// Copies this number into a larger space; direction i moves to index[i].
  template <int M>
  Dual2<M> embed(const std::array<int, N>& index) const {
    Dual2<M> d(v_);
    for (int i = 0; i < N; ++i) {
      d.raw_grad(index[i]) = g_[i];
      for (int j = i; j < N; ++j) d.raw_hess(index[i], index[j]) = h_[packed_index(i, j)];
    }
    return d;
  }

  double& raw_grad(int i) { return g_[i]; }
  double& raw_hess(int i, int j) { return h_[packed_index(i, j)]; }

 private:
  double v_ = 0.0;
  std::array<double, N> g_{};
  std::array<double, kPacked> h_{};
};

template <class T>
struct is_dual : std::false_type {};
template <int N>
struct is_dual<Dual1<N>> : std::true_type {};
template <int N>
struct is_dual<Dual2<N>> : std::true_type {};

template <class T>
concept DualNumber = is_dual<T>::value;

inline double value_of(double x) { return x; }
template <DualNumber T>
double value_of(const T& x) {
  return x.value();
}

#define BEAMTIE_AD_BINARY(OP, OPEQ)                                         \
  template <DualNumber T>                                                   \
  T operator OP(T a, const T& b) {                                          \
    a OPEQ b;                                                               \
    return a;                                                               \
  }                                                                         \
  template <DualNumber T>                                                   \
  T operator OP(T a, double b) {                                            \
    a OPEQ T(b);                                                            \
    return a;                                                               \
  }                                                                         \
  template <DualNumber T>                                                   \
  T operator OP(double a, const T& b) {                                     \
    T r(a);                                                                 \
    r OPEQ b;                                                               \
    return r;                                                               \
  }

BEAMTIE_AD_BINARY(+, +=)
BEAMTIE_AD_BINARY(-, -=)
#undef BEAMTIE_AD_BINARY

template <DualNumber T>
T operator/(T a, const T& b) {
  a /= b;
  return a;
}
template <DualNumber T>
T operator/(T a, double b) {
  a *= 1.0 / b;
  return a;
}
template <DualNumber T>
T operator/(double a, const T& b) {
  const double v = b.value();
  return b.chain(a / v, -a / (v * v), 2.0 * a / (v * v * v));
}

template <DualNumber T>
T operator*(T a, const T& b) {
  a *= b;
  return a;
}
template <DualNumber T>
T operator*(T a, double s) {
  a *= s;
  return a;
}
template <DualNumber T>
T operator*(double s, T a) {
  a *= s;
  return a;
}

template <DualNumber T>
bool operator<(const T& a, double b) {
  return a.value() < b;
}
template <DualNumber T>
bool operator>(const T& a, double b) {
  return a.value() > b;
}

template <DualNumber T>
T sqrt(const T& x) {
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s, -0.25 / (s * x.value()));
}
template <DualNumber T>
T sin(const T& x) {
  const double s = std::sin(x.value());
  return x.chain(s, std::cos(x.value()), -s);
}
template <DualNumber T>
T cos(const T& x) {
  const double c = std::cos(x.value());
  return x.chain(c, -std::sin(x.value()), -c);
}
template <DualNumber T>
T atan(const T& x) {
  const double v = x.value();
  const double d = 1.0 / (1.0 + v * v);
  return x.chain(std::atan(v), d, -2.0 * v * d * d);
}
template <DualNumber T>
T log(const T& x) {
  const double v = x.value();
  return x.chain(std::log(v), 1.0 / v, -1.0 / (v * v));
}
template <DualNumber T>
T exp(const T& x) {
  const double e = std::exp(x.value());
  return x.chain(e, e, e);
}

/// Seeds one independent variable per entry of values.
template <class Dual>
std::array<Dual, Dual::kSize> seed(std::span<const double> values) {
  std::array<Dual, Dual::kSize> out{};
  for (int i = 0; i < Dual::kSize; ++i)
    out[i] = Dual::variable(i < static_cast<int>(values.size()) ? values[i] : 0.0, i);
  return out;
}

}  // namespace beamtie::ad
