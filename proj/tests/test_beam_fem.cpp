#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamtie/beam_fem.hpp"

using namespace beamtie;

namespace {

struct ElementFixture {
  BeamElementGeometry g;
  BeamNodeState a, b;
  CrossSection cs{0.05, 100.0, 0.3};
};

// Slightly curved reference element with consistent nodal triads.
ElementFixture curved_element() {
  ElementFixture s;
  const Vec3 r1(0.1, 0.2, -0.1), r2(0.6, 0.35, 0.05);
  const Vec3 t1 = Vec3(1.0, 0.1, 0.2).normalized();
  const Vec3 t2 = Vec3(1.0, 0.4, 0.3).normalized();
  const Triad l1 = exp_map(RotationVector(0.3 * t1)) * smallest_rotation_from_e1(t1);
  const Triad l2 = exp_map(RotationVector(0.35 * t2)) * smallest_rotation_from_e1(t2);
  s.a = {r1, t1, l1};
  s.b = {r2, t2, l2};
  BeamMesh m;
  m.nodes = {{r1, t1, l1}, {r2, t2, l2}};
  m.elements = {{{0, 1}, 0.0, 0}};
  finalize_beam_mesh(m);
  s.g = beam_geometry(m, 0);
  return s;
}

Eigen::Matrix<double, 18, 1> residual_at(const ElementFixture& s, const BeamNodeState& a,
                                         const BeamNodeState& b) {
  return beam_internal_force_tangent(s.g, s.cs, a, b).residual;
}

void perturb(BeamNodeState& a, BeamNodeState& b, int dof, double h) {
  BeamNodeState& n = dof < 9 ? a : b;
  const int k = dof % 9;
  if (k < 3) n.r[k] += h;
  else if (k < 6) n.t[k - 3] += h;
  else {
    Vec3 d = Vec3::Zero();
    d[k - 6] = h;
    n.triad = exp_map(d) * n.triad;
  }
}

}  // namespace

TEST(Hermite, InterpolationProperties) {
  const BeamNodeState a{Vec3(0, 0, 0), Vec3(1, 0, 0), Mat3::Identity()};
  const BeamNodeState b{Vec3(2, 0, 0), Vec3(1, 0, 0), Mat3::Identity()};
  const auto [r0, d0] = hermite_eval(2.0, -1.0, a, b);
  EXPECT_LT((r0 - a.r).norm(), 1e-15);
  EXPECT_LT((d0 - a.t).norm(), 1e-15);  // dr/dξ = L/2 t with L = 2
  const auto [rm, dm] = hermite_eval(2.0, 0.0, a, b);
  EXPECT_LT((rm - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_NEAR(dm.norm() / 1.0, 1.0, 1e-15);
  for (int k = 0; k < 20; ++k) {
    const double xi = -1.0 + 2.0 * k / 19.0;
    const HermiteShape s = hermite_shape(xi, 0.37);
    EXPECT_NEAR(s.h[0] + s.h[2], 1.0, 1e-14);
    EXPECT_NEAR(s.dh[0] + s.dh[2], 0.0, 1e-14);
  }
}

TEST(Hermite, LengthParameterIsArcLength) {
  const ElementFixture s = curved_element();
  EXPECT_NEAR(hermite_arc_length(s.a.r, s.a.t, s.b.r, s.b.t, s.g.L), s.g.L, 1e-13);
}

TEST(BeamStrains, ReferenceIsZero) {
  const ElementFixture s = curved_element();
  for (double xi : {-1.0, -0.3, 0.5, 1.0}) {
    const BeamStrains e = beam_strains(s.g, s.a, s.b, xi);
    EXPECT_LT(e.Gamma.norm(), 1e-14);
    EXPECT_LT(e.Omega.norm(), 1e-14);
  }
}

TEST(BeamStrains, PureTension) {
  BeamMesh m;
  m.nodes = {{Vec3(0, 0, 0), Vec3(1, 0, 0), Mat3::Identity()},
             {Vec3(1, 0, 0), Vec3(1, 0, 0), Mat3::Identity()}};
  m.elements = {{{0, 1}, 0.0, 0}};
  finalize_beam_mesh(m);
  const BeamElementGeometry g = beam_geometry(m, 0);
  const double a = 1.3;
  const BeamNodeState s1{Vec3(0, 0, 0), Vec3(a, 0, 0), Mat3::Identity()};
  const BeamNodeState s2{Vec3(a, 0, 0), Vec3(a, 0, 0), Mat3::Identity()};
  const BeamStrains e = beam_strains(g, s1, s2, 0.2);
  EXPECT_LT((e.Gamma - Vec3(a - 1.0, 0, 0)).norm(), 1e-14);
  EXPECT_LT(e.Omega.norm(), 1e-15);
}

TEST(BeamStrains, CircularArcCurvature) {
  const double rho = 10.0, L = 0.5;
  BeamMesh m;
  m.nodes = {{Vec3(0, 0, 0), Vec3(1, 0, 0), Mat3::Identity()},
             {Vec3(L, 0, 0), Vec3(1, 0, 0), Mat3::Identity()}};
  m.elements = {{{0, 1}, 0.0, 0}};
  finalize_beam_mesh(m);
  const BeamElementGeometry g = beam_geometry(m, 0);
  // bend into an arc of radius rho in the e1-e2 plane
  const double ang = L / rho;
  const BeamNodeState s1{Vec3(0, 0, 0), Vec3(1, 0, 0), Mat3::Identity()};
  const BeamNodeState s2{Vec3(rho * std::sin(ang), rho * (1 - std::cos(ang)), 0),
                         Vec3(std::cos(ang), std::sin(ang), 0), exp_map(Vec3(0, 0, ang))};
  const BeamStrains e = beam_strains(g, s1, s2, 0.0);
  EXPECT_NEAR(e.Omega.norm(), 1.0 / rho, 1e-3 / rho);
  EXPECT_NEAR(e.Omega[2], 1.0 / rho, 1e-3 / rho);
}

TEST(BeamElement, ReferenceResidualZero) {
  const ElementFixture s = curved_element();
  const BeamElementResult r = beam_internal_force_tangent(s.g, s.cs, s.a, s.b);
  EXPECT_LT(r.residual.norm(), 1e-14);
  EXPECT_LT(std::abs(r.energy), 1e-20);
}

TEST(BeamElement, RigidMotionGivesZeroResidual) {
  const ElementFixture s = curved_element();
  const Mat3 R = exp_map(Vec3(0.7, -0.4, 1.1));
  const Vec3 c(1.0, -2.0, 0.5);
  const BeamNodeState a{R * s.a.r + c, R * s.a.t, R * s.a.triad};
  const BeamNodeState b{R * s.b.r + c, R * s.b.t, R * s.b.triad};
  const BeamElementResult r = beam_internal_force_tangent(s.g, s.cs, a, b);
  EXPECT_LT(r.residual.norm(), 1e-10);
  EXPECT_LT(std::abs(r.energy), 1e-20);
}

TEST(BeamElement, EnergyIsObjective) {
  ElementFixture s = curved_element();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  BeamNodeState a = s.a, b = s.b;
  a.r += Vec3(u(rng), u(rng), u(rng));
  b.t += Vec3(u(rng), u(rng), u(rng));
  b.triad = exp_map(Vec3(u(rng), u(rng), u(rng))) * b.triad;
  const double e0 = beam_element_energy(s.g, s.cs, a, b);
  const Mat3 R = exp_map(Vec3(-0.2, 1.4, 0.3));
  const Vec3 c(3.0, 0.0, -1.0);
  const BeamNodeState ra{R * a.r + c, R * a.t, R * a.triad};
  const BeamNodeState rb{R * b.r + c, R * b.t, R * b.triad};
  EXPECT_GT(e0, 0.0);
  EXPECT_NEAR(beam_element_energy(s.g, s.cs, ra, rb), e0, 1e-12 * e0);
}

TEST(BeamElement, TangentMatchesFiniteDifference) {
  ElementFixture s = curved_element();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  BeamNodeState a = s.a, b = s.b;
  a.r += Vec3(u(rng), u(rng), u(rng));
  a.t += Vec3(u(rng), u(rng), u(rng));
  b.r += Vec3(u(rng), u(rng), u(rng));
  a.triad = exp_map(Vec3(3 * u(rng), 3 * u(rng), 3 * u(rng))) * a.triad;
  b.triad = exp_map(Vec3(3 * u(rng), 3 * u(rng), 3 * u(rng))) * b.triad;
  const BeamElementResult r = beam_internal_force_tangent(s.g, s.cs, a, b);
  const double h = 1e-6;
  Eigen::Matrix<double, 18, 18> K;
  for (int c = 0; c < 18; ++c) {
    BeamNodeState ap = a, bp = b, am = a, bm = b;
    perturb(ap, bp, c, h);
    perturb(am, bm, c, -h);
    K.col(c) = (residual_at(s, ap, bp) - residual_at(s, am, bm)) / (2 * h);
  }
  EXPECT_LT((K - r.tangent).cwiseAbs().maxCoeff(), 1e-5 * r.tangent.cwiseAbs().maxCoeff());
  // the residual is the energy derivative under multiplicative variations
  for (int c = 0; c < 18; ++c) {
    BeamNodeState ap = a, bp = b, am = a, bm = b;
    perturb(ap, bp, c, h);
    perturb(am, bm, c, -h);
    const double fd = (beam_element_energy(s.g, s.cs, ap, bp) - beam_element_energy(s.g, s.cs, am, bm)) / (2 * h);
    EXPECT_NEAR(r.residual[c], fd, 1e-6 * r.residual.cwiseAbs().maxCoeff());
  }
}

TEST(BeamElement, LineLoadResultant) {
  const ElementFixture s = curved_element();
  const Vec3 q(0.0, 0.0, 0.025);
  const auto f = beam_line_load(s.g, q);
  double len = 0.0;
  for (size_t k = 0; k < s.g.w.size(); ++k) len += s.g.w[k] * s.g.J[k];
  EXPECT_LT((f.segment<3>(0) + f.segment<3>(6) - q * len).norm(), 1e-15);
  EXPECT_NEAR(len, s.g.L, 1e-6 * s.g.L);
}
