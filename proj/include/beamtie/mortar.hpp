#pragma once

// Segment-based mortar coupling of beam centerlines to a solid surface:
// positional constraints (three variants), rotational constraints, penalty
// potential and the conservation audit.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "beamtie/model.hpp"
#include "beamtie/surface.hpp"

namespace beamtie {

struct Segment {
  int beam_element = -1;
  double xi_a = -1.0, xi_b = 1.0;  // beam parent interval
  int facet = -1;
};

/// One Gauss point of the coupling integrals, frozen in the reference configuration.
struct CouplingPoint {
  int segment = -1;
  int beam_element = -1;
  double xi_beam = 0.0;
  double ds = 0.0;  // Gauss weight times reference arc-length Jacobian
  std::array<double, 2> phi{};  // multiplier shape functions of the element nodes
  std::array<double, 4> hermite{};
  int facet = -1;
  double xi = 0.0, eta = 0.0;
  double gap0 = 0.0;
  Vec3 beam_point0 = Vec3::Zero();
  Vec3 surface_point0 = Vec3::Zero();
  SurfaceTriadData triad;
};

struct MortarSetup {
  SurfaceMesh surface;
  std::vector<Segment> segments;
  std::vector<CouplingPoint> points;
  std::vector<double> kappa;    // per beam node, ∫Φ_j ds
  std::vector<char> active;     // per beam node
  std::vector<double> coupled_length;  // per beam element
};

struct SegmentOptions {
  int samples = 33;
  double bisection_tol = 1e-10;
  int gauss_points = 6;
};

/// Splits the coupled beam elements at facet changes and places the Gauss points.
MortarSetup build_mortar(const Model& model, const SegmentOptions& opt);
MortarSetup build_mortar(const Model& model);

/// Mortar quantities at a state. Rows are 3 per beam node (multiplier node);
/// inactive nodes have zero rows.
struct MortarData {
  Eigen::SparseMatrix<double> D;   // beam position and tangent columns
  Eigen::SparseMatrix<double> M;   // solid columns
  Eigen::VectorXd q;               // constant part of the positional constraint
  Eigen::SparseMatrix<double> Q;   // −∂q/∂d_S, CONS only
  Eigen::VectorXd r;               // positional constraint D x_B − M x_S − q
  Eigen::VectorXd r_theta;         // rotational constraint ∫Φ ψ_SB ds
  Eigen::SparseMatrix<double> G_theta;  // ∂r_theta / ∂(θ, d_S)
  std::vector<double> kappa;
  std::vector<char> active;
};

/// Evaluates D, M, q, Q, r and the rotational constraint with first derivatives.
MortarData evaluate_mortar(const Model& model, const MortarSetup& setup, const State& state);

/// Penalty potential, its gradient and tangent in the global layout. The
/// tangent holds chart second derivatives for rotations; the caller applies the
/// multiplicative correction once for the total gradient.
struct PenaltyContribution {
  double energy_positional = 0.0;
  double energy_rotational = 0.0;
  Eigen::VectorXd gradient;
  std::vector<Eigen::Triplet<double>> tangent;
};

PenaltyContribution penalty_condense(const Model& model, const MortarSetup& setup,
                                     const MortarData& data, const State& state,
                                     bool with_tangent = true);

/// λ_j = ε κ_j⁻¹ r_j for active nodes.
Eigen::VectorXd positional_multipliers(const Model& model, const MortarData& data);
Eigen::VectorXd rotational_multipliers(const Model& model, const MortarData& data);

struct ConservationAudit {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  double lambda_norm = 0.0;     // max nodal |λ|
  double coupled_length = 0.0;
};

/// Net force and moment about the origin of the coupling forces given as a
/// global gradient vector.
ConservationAudit conservation_audit(const Model& model, const MortarSetup& setup,
                                     const MortarData& data, const State& state,
                                     const Eigen::VectorXd& coupling_gradient);

}  // namespace beamtie
