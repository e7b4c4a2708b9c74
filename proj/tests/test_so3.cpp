#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamtie/so3.hpp"

using namespace beamtie;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent reference: unit quaternion to rotation matrix.
Mat3 quaternion_matrix(const Vec3& psi) {
  const double a = psi.norm();
  const double w = std::cos(0.5 * a);
  const Vec3 v = a > 0.0 ? Vec3(psi / a * std::sin(0.5 * a)) : Vec3::Zero();
  const double x = v.x(), y = v.y(), z = v.z();
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Vec3 random_vector(std::mt19937& rng, double max_norm) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 d(n(rng), n(rng), n(rng));
  return d.normalized() * max_norm * u(rng);
}

}  // namespace

TEST(ExpMap, Identity) {
  EXPECT_LT((exp_map(Vec3::Zero()) - Mat3::Identity()).norm(), 1e-15);
}

TEST(ExpMap, QuarterTurnAboutE1) {
  const Mat3 r = exp_map(Vec3(kPi / 2, 0, 0));
  EXPECT_LT((r.col(1) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((r.col(2) - Vec3(0, -1, 0)).norm(), 1e-15);
}

TEST(ExpMap, MatchesQuaternionOracle) {
  const Vec3 p(0.3, -0.4, 1.2);
  const Mat3 r = exp_map(p);
  EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-14);
  EXPECT_LT((r - quaternion_matrix(p)).norm(), 1e-14);
}

TEST(ExpMap, QuaternionCompositionOracle) {
  // Composing two rotations equals the quaternion product of their halves.
  const Vec3 a(0.2, 0.1, -0.7), b(-1.1, 0.4, 0.3);
  EXPECT_LT((exp_map(a) * exp_map(b) - quaternion_matrix(a) * quaternion_matrix(b)).norm(),
            1e-14);
}

TEST(ExpMap, SmallAngleSeriesIsContinuous) {
  const Vec3 e = Vec3(1, 2, -2).normalized();
  for (double a : {1e-3, 1e-5, 9.9e-7, 1.01e-6, 1e-9}) {
    EXPECT_LT((exp_map(Vec3(a * e)) - quaternion_matrix(a * e)).norm(), 1e-15) << a;
  }
}

TEST(ExpMap, PreservesLength) {
  std::mt19937 rng(7);
  for (int k = 0; k < 200; ++k) {
    const Vec3 p = random_vector(rng, 10.0);
    const Vec3 v = random_vector(rng, 3.0);
    EXPECT_NEAR((exp_map(p) * v).norm(), v.norm(), 1e-12);
  }
}

TEST(Rv, IdentityAndQuarterTurn) {
  EXPECT_LT(rv(Mat3(Mat3::Identity())).norm(), 1e-15);
  EXPECT_LT((rv(exp_map(Vec3(kPi / 2, 0, 0))) - Vec3(kPi / 2, 0, 0)).norm(), 1e-14);
}

TEST(Rv, RoundTrip) {
  std::mt19937 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 p = random_vector(rng, kPi - 0.01);
    const Vec3 q = rv(exp_map(p));
    EXPECT_LT((q - p).norm(), 1e-9);
    EXPECT_LE(q.norm(), kPi);
    EXPECT_LT((exp_map(q) - exp_map(p)).norm(), 1e-10);
  }
}

TEST(Rv, AngleBeyondPiFoldsBack) {
  const Vec3 e = Vec3(0.3, -0.2, 0.9).normalized();
  const Vec3 q = rv(exp_map(Vec3(4.0 * e)));
  EXPECT_NEAR(q.norm(), 2 * kPi - 4.0, 1e-12);
  EXPECT_LT((exp_map(q) - exp_map(Vec3(4.0 * e))).norm(), 1e-12);
}

TEST(Rv, RejectsNonOrthonormal) {
  Mat3 m = Mat3::Identity();
  m(0, 1) = 1e-6;
  EXPECT_THROW(rv(m), InvalidRotation);
  EXPECT_THROW(rv(Mat3(-Mat3::Identity())), InvalidRotation);
}

TEST(RelativeRotation, Cases) {
  std::mt19937 rng(3);
  const Mat3 l = exp_map(random_vector(rng, 2.0));
  EXPECT_LT(relative_rotation(l, l).norm(), 1e-14);
  const Vec3 p(0.4, -1.0, 0.5);
  EXPECT_LT((relative_rotation(Mat3(Mat3::Identity()), exp_map(p)) - p).norm(), 1e-13);
  for (int k = 0; k < 100; ++k) {
    const Mat3 l1 = exp_map(random_vector(rng, 3.0));
    const Mat3 l2 = exp_map(random_vector(rng, 3.0));
    const Vec3 r12 = relative_rotation(l1, l2);
    EXPECT_LT((exp_map(r12) * l1 - l2).norm(), 1e-10);
    const Vec3 r21 = relative_rotation(l2, l1);
    EXPECT_LT((exp_map(r21) - exp_map(r12).transpose()).norm(), 1e-10);
  }
}

TEST(GeodesicInterpolate, EndpointsAndMidpoint) {
  std::mt19937 rng(5);
  const Mat3 l1 = exp_map(random_vector(rng, 2.0));
  const Mat3 l2 = exp_map(Vec3(0.3, 0.2, 0.1)) * l1;
  EXPECT_LT((geodesic_interpolate(l1, l2, 0.0) - l1).norm(), 1e-14);
  EXPECT_LT((geodesic_interpolate(l1, l2, 1.0) - l2).norm(), 1e-13);
  const Mat3 half = geodesic_interpolate(Mat3(Mat3::Identity()), exp_map(Vec3(0, 0, kPi / 2)), 0.5);
  EXPECT_LT((half - exp_map(Vec3(0, 0, kPi / 4))).norm(), 1e-14);
}

TEST(GeodesicInterpolate, Objectivity) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Mat3 l1 = exp_map(random_vector(rng, 3.0));
    const Mat3 l2 = exp_map(random_vector(rng, 2.5)) * l1;
    const Mat3 r = exp_map(random_vector(rng, 3.0));
    const double t = u(rng);
    EXPECT_LT((geodesic_interpolate(Mat3(r * l1), Mat3(r * l2), t) -
               r * geodesic_interpolate(l1, l2, t))
                  .norm(),
              1e-11);
  }
}

TEST(GeodesicInterpolate, SingularAtHalfTurn) {
  const Mat3 l2 = exp_map(Vec3(0, kPi - 1e-8, 0));
  EXPECT_THROW(geodesic_interpolate(Mat3(Mat3::Identity()), l2, 0.5), InterpolationSingularity);
}

TEST(Rv, DualDerivativeMatchesFiniteDifference) {
  using D = ad::Dual2<3>;
  const Mat3 base = exp_map(Vec3(0.5, -0.3, 0.8));
  const Vec3 th(0.01, 0.02, -0.015);
  Vec3T<D> x;
  for (int i = 0; i < 3; ++i) x[i] = D::variable(th[i], i);
  const Vec3T<D> r = rv(exp_map(x) * Mat3T<D>(base));
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Vec3 tp = th, tm = th;
    tp[i] += h;
    tm[i] -= h;
    const Vec3 fd = (rv(Mat3(exp_map(tp) * base)) - rv(Mat3(exp_map(tm) * base))) / (2 * h);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(r[c].grad(i), fd[c], 1e-8);
  }
}
