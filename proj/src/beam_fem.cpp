#include "beamtie/beam_fem.hpp"

#include <cmath>
#include <numbers>

#include "beamtie/error.hpp"

namespace beamtie {

namespace {

constexpr double kGauss4x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                0.8611363115940526};
constexpr double kGauss4w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                0.3478548451374538};

using D6 = ad::Dual2<6>;
using D18 = ad::Dual2<18>;

D18 lift(const D6& x) {
  static constexpr std::array<int, 6> kRot = {6, 7, 8, 15, 16, 17};
  return x.embed<18>(kRot);
}
double lift(double x) { return x; }

// Energy of one element. R is the scalar carrying rotation increments, F the
// scalar carrying all unknowns.
template <class R, class F>
F energy_impl(const BeamElementGeometry& g, const CrossSection& cs, const BeamNodeState& a,
              const BeamNodeState& b, const std::array<Vec3T<R>, 2>& theta,
              const std::array<Vec3T<F>, 4>& pos) {
  const Mat3T<R> l1 = exp_map(theta[0]) * Mat3T<R>(a.triad);
  const Mat3T<R> l2 = exp_map(theta[1]) * Mat3T<R>(b.triad);
  const Vec3T<R> phi = relative_rotation(l1, l2);
  if (value(phi).norm() >= std::numbers::pi - 1e-6)
    throw InterpolationSingularity("beam element: nodal triads rotated by pi relative to each other");
  const Vec3T<R> k1 = l1.transpose() * phi;
  const Vec3 CF = cs.force_stiffness();
  const Vec3 CM = cs.moment_stiffness();

  F energy(0.0);
  for (size_t q = 0; q < g.xi.size(); ++q) {
    const HermiteShape s = hermite_shape(g.xi[q], g.L);
    const double tq = 0.5 * (1.0 + g.xi[q]);
    const Mat3T<R> lam = exp_map(phi * R(tq)) * l1;
    const double invJ = 1.0 / g.J[q];
    Vec3T<F> dr;
    for (int c = 0; c < 3; ++c)
      dr[c] = s.dh[0] * pos[0][c] + s.dh[1] * pos[1][c] + s.dh[2] * pos[2][c] + s.dh[3] * pos[3][c];
    F w(0.0);
    for (int i = 0; i < 3; ++i) {
      F gi = lift(lam(0, i)) * dr[0];
      gi += lift(lam(1, i)) * dr[1];
      gi += lift(lam(2, i)) * dr[2];
      gi = gi * invJ - g.gamma0[q][i];
      const F oi = lift(k1[i] * (0.5 * invJ)) - g.kappa0[q][i];
      w += CF[i] * gi * gi + CM[i] * oi * oi;
    }
    energy += w * (0.5 * g.w[q] * g.J[q]);
  }
  return energy;
}

}  // namespace

double CrossSection::area() const { return std::numbers::pi * radius * radius; }
double CrossSection::inertia() const { return 0.25 * std::numbers::pi * std::pow(radius, 4); }
double CrossSection::polar_inertia() const { return 0.5 * std::numbers::pi * std::pow(radius, 4); }
Vec3 CrossSection::force_stiffness() const {
  const double ga = shear_modulus() * area();
  return Vec3(E * area(), ga, ga);
}
Vec3 CrossSection::moment_stiffness() const {
  const double ei = E * inertia();
  return Vec3(shear_modulus() * polar_inertia(), ei, ei);
}

HermiteShape hermite_shape(double xi, double L) {
  const double m = 1.0 - xi, p = 1.0 + xi;
  HermiteShape s;
  s.h = {0.25 * m * m * (2.0 + xi), L / 8.0 * m * m * p, 0.25 * p * p * (2.0 - xi),
         -L / 8.0 * p * p * m};
  s.dh = {-0.75 * (1.0 - xi * xi), L / 8.0 * m * (-1.0 - 3.0 * xi), 0.75 * (1.0 - xi * xi),
          -L / 8.0 * p * (1.0 - 3.0 * xi)};
  return s;
}

std::pair<Vec3, Vec3> hermite_eval(double L, double xi, const BeamNodeState& a,
                                   const BeamNodeState& b) {
  const HermiteShape s = hermite_shape(xi, L);
  const Vec3 r = s.h[0] * a.r + s.h[1] * a.t + s.h[2] * b.r + s.h[3] * b.t;
  const Vec3 dr = s.dh[0] * a.r + s.dh[1] * a.t + s.dh[2] * b.r + s.dh[3] * b.t;
  return {r, dr};
}

double hermite_arc_length(const Vec3& r1, const Vec3& t1, const Vec3& r2, const Vec3& t2,
                          double L) {
  const BeamNodeState a{r1, t1, Mat3::Identity()}, b{r2, t2, Mat3::Identity()};
  const int sub = 16;
  double s = 0.0;
  for (int k = 0; k < sub; ++k) {
    const double x0 = -1.0 + 2.0 * k / sub, h = 2.0 / sub;
    for (int q = 0; q < 4; ++q) {
      const double xi = x0 + 0.5 * h * (1.0 + kGauss4x[q]);
      s += 0.5 * h * kGauss4w[q] * hermite_eval(L, xi, a, b).second.norm();
    }
  }
  return s;
}

void finalize_beam_mesh(BeamMesh& mesh) {
  for (auto& el : mesh.elements) {
    const BeamNode& a = mesh.nodes[el.nodes[0]];
    const BeamNode& b = mesh.nodes[el.nodes[1]];
    double L = (b.r0 - a.r0).norm();
    if (!(L > 0.0)) throw ModelError("beam element with coincident nodes");
    for (int it = 0; it < 100; ++it) {
      const double next = hermite_arc_length(a.r0, a.t0, b.r0, b.t0, L);
      const bool done = std::abs(next - L) <= 1e-15 * L;
      L = next;
      if (done) break;
    }
    el.length = L;
  }
}

BeamElementGeometry beam_geometry(double L, const BeamNodeState& a, const BeamNodeState& b,
                                  const std::vector<double>& xi, const std::vector<double>& w) {
  BeamElementGeometry g;
  g.L = L;
  g.xi = xi;
  g.w = w;
  g.reference = {a, b};
  const Vec3 phi0 = relative_rotation(a.triad, b.triad);
  for (double x : xi) {
    const auto [r, dr] = hermite_eval(L, x, a, b);
    const double J = dr.norm();
    if (!(J > 0.0)) throw DegenerateElement("beam element with zero centerline derivative");
    const Triad lam = exp_map(RotationVector(0.5 * (1.0 + x) * phi0)) * a.triad;
    g.J.push_back(J);
    g.gamma0.push_back(lam.transpose() * dr / J);
    g.kappa0.push_back(a.triad.transpose() * phi0 / (2.0 * J));
  }
  return g;
}

BeamElementGeometry beam_geometry(const BeamMesh& mesh, int e) {
  const BeamElement& el = mesh.elements[e];
  const BeamNode& a = mesh.nodes[el.nodes[0]];
  const BeamNode& b = mesh.nodes[el.nodes[1]];
  return beam_geometry(el.length, {a.r0, a.t0, a.triad0}, {b.r0, b.t0, b.triad0},
                       {kGauss4x, kGauss4x + 4}, {kGauss4w, kGauss4w + 4});
}

BeamStrains beam_strains(const BeamElementGeometry& g, const BeamNodeState& a,
                         const BeamNodeState& b, double xi) {
  const BeamElementGeometry ref = beam_geometry(g.L, g.reference[0], g.reference[1], {xi}, {1.0});
  const Vec3 phi = relative_rotation(a.triad, b.triad);
  const Triad lam = exp_map(RotationVector(0.5 * (1.0 + xi) * phi)) * a.triad;
  const Vec3 dr = hermite_eval(g.L, xi, a, b).second;
  const double J = ref.J[0];
  return {lam.transpose() * dr / J - ref.gamma0[0], a.triad.transpose() * phi / (2.0 * J) - ref.kappa0[0]};
}

BeamElementResult beam_internal_force_tangent(const BeamElementGeometry& g,
                                              const CrossSection& cs, const BeamNodeState& a,
                                              const BeamNodeState& b) {
  std::array<Vec3T<D6>, 2> theta;
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 3; ++c) theta[n][c] = D6::variable(0.0, 3 * n + c);
  const BeamNodeState* st[2] = {&a, &b};
  std::array<Vec3T<D18>, 4> pos;
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 3; ++c) {
      pos[2 * n][c] = D18::variable(st[n]->r[c], 9 * n + c);
      pos[2 * n + 1][c] = D18::variable(st[n]->t[c], 9 * n + 3 + c);
    }
  const D18 e = energy_impl<D6, D18>(g, cs, a, b, theta, pos);
  BeamElementResult out;
  out.energy = e.value();
  for (int i = 0; i < 18; ++i) {
    out.residual[i] = e.grad(i);
    for (int j = 0; j < 18; ++j) out.tangent(i, j) = e.hess(i, j);
  }
  add_rotation_correction(out.tangent, out.residual, 6);
  add_rotation_correction(out.tangent, out.residual, 15);
  return out;
}

double beam_element_energy(const BeamElementGeometry& g, const CrossSection& cs,
                           const BeamNodeState& a, const BeamNodeState& b) {
  std::array<Vec3T<double>, 2> theta{Vec3T<double>(0, 0, 0), Vec3T<double>(0, 0, 0)};
  std::array<Vec3T<double>, 4> pos{Vec3T<double>(a.r), Vec3T<double>(a.t), Vec3T<double>(b.r),
                                   Vec3T<double>(b.t)};
  return energy_impl<double, double>(g, cs, a, b, theta, pos);
}

Eigen::Matrix<double, 12, 1> beam_line_load(const BeamElementGeometry& g, const Vec3& q) {
  Eigen::Matrix<double, 12, 1> f = Eigen::Matrix<double, 12, 1>::Zero();
  for (size_t k = 0; k < g.xi.size(); ++k) {
    const HermiteShape s = hermite_shape(g.xi[k], g.L);
    for (int a = 0; a < 4; ++a) f.segment<3>(3 * a) += g.w[k] * g.J[k] * s.h[a] * q;
  }
  return f;
}

void add_rotation_correction(Eigen::Ref<Eigen::MatrixXd> K, const Eigen::Ref<const Eigen::VectorXd>& grad,
                             int row) {
  K.block<3, 3>(row, row) -= 0.5 * skew(Vec3(grad.segment<3>(row)));
}

}  // namespace beamtie
