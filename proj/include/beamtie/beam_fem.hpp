#pragma once

// Simo–Reissner beam elements: cubic Hermite centerline, two nodal triads
// interpolated geodesically.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamtie/so3.hpp"

namespace beamtie {

struct CrossSection {
  double radius = 0.05;
  double E = 1.0;
  double nu = 0.0;

  double area() const;
  double inertia() const;        // I = πR⁴/4
  double polar_inertia() const;  // J = πR⁴/2
  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  Vec3 force_stiffness() const;   // (EA, GA, GA)
  Vec3 moment_stiffness() const;  // (GJ, EI, EI)
};

struct BeamNode {
  Vec3 r0;
  Vec3 t0;
  Triad triad0;
};

struct BeamElement {
  std::array<int, 2> nodes;
  double length = 0.0;  // Hermite length parameter, set by finalize_beam_mesh
  int section = 0;
};

/// A named chain of elements belonging to one physical beam.
struct Beam {
  std::string name;
  std::vector<int> elements;
};

struct BeamMesh {
  std::vector<BeamNode> nodes;
  std::vector<BeamElement> elements;
  std::vector<CrossSection> sections;
  std::vector<Beam> beams;

  int node_count() const { return static_cast<int>(nodes.size()); }
};

/// Sets every element's length parameter to the arc length of its Hermite curve.
void finalize_beam_mesh(BeamMesh& mesh);

/// Arc length of the reference Hermite curve for a given length parameter.
double hermite_arc_length(const Vec3& r1, const Vec3& t1, const Vec3& r2, const Vec3& t2,
                          double L);

struct HermiteShape {
  // order: node-1 position, node-1 tangent, node-2 position, node-2 tangent
  std::array<double, 4> h;
  std::array<double, 4> dh;  // d/dξ
};

HermiteShape hermite_shape(double xi, double L);

struct BeamNodeState {
  Vec3 r;
  Vec3 t;
  Triad triad;
};

/// Centerline position and derivative with respect to ξ.
std::pair<Vec3, Vec3> hermite_eval(double L, double xi, const BeamNodeState& a,
                                   const BeamNodeState& b);

/// Gauss points of the element with the reference quantities the strains need.
struct BeamElementGeometry {
  double L = 0.0;
  std::vector<double> xi, w, J;
  std::vector<Vec3> gamma0;  // Λ0ᵀ r0'
  std::vector<Vec3> kappa0;  // Λ0,1ᵀ φ0 / 2J
  std::array<BeamNodeState, 2> reference;
};

BeamElementGeometry beam_geometry(const BeamMesh& mesh, int e);
BeamElementGeometry beam_geometry(double L, const BeamNodeState& a, const BeamNodeState& b,
                                  const std::vector<double>& xi, const std::vector<double>& w);

struct BeamStrains {
  Vec3 Gamma;
  Vec3 Omega;
};

/// Reference-matched strains at parent coordinate xi.
BeamStrains beam_strains(const BeamElementGeometry& g, const BeamNodeState& a,
                         const BeamNodeState& b, double xi);

struct BeamElementResult {
  double energy = 0.0;
  Eigen::Matrix<double, 18, 1> residual;
  Eigen::Matrix<double, 18, 18> tangent;
};

/// Internal energy, residual and tangent in the per-node layout (r, t, θ) where θ
/// are spatial multiplicative rotation increments.
BeamElementResult beam_internal_force_tangent(const BeamElementGeometry& g,
                                              const CrossSection& cs, const BeamNodeState& a,
                                              const BeamNodeState& b);

double beam_element_energy(const BeamElementGeometry& g, const CrossSection& cs,
                           const BeamNodeState& a, const BeamNodeState& b);

/// Consistent nodal forces (r, t components per node) of a dead line load per
/// reference length.
Eigen::Matrix<double, 12, 1> beam_line_load(const BeamElementGeometry& g, const Vec3& q);

/// Adds −½ S(g) to the rotational diagonal blocks, where g is the rotational
/// part of the gradient; makes a chart Hessian consistent with multiplicative updates.
void add_rotation_correction(Eigen::Ref<Eigen::MatrixXd> K, const Eigen::Ref<const Eigen::VectorXd>& grad,
                             int row);

}  // namespace beamtie
