#pragma once

// Problem definition, degree-of-freedom layout and the solution state.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamtie/beam_fem.hpp"
#include "beamtie/solid_fem.hpp"

namespace beamtie {

enum class Variant { cons, ref, disp };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct CouplingConfig {
  Variant variant = Variant::cons;
  bool rotational = true;
  double eps_r = 100.0;
  double eps_theta = 0.1;
  int gauss_points = 6;
  std::vector<std::string> face_sets;  // coupling surface
  std::vector<int> beams;              // coupled beams; empty means all
};

struct SolveConfig {
  int steps = 10;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_iterations = 25;
};

struct SolidDirichlet {
  std::string node_set;
  std::array<bool, 3> fixed{true, true, true};
};

struct BeamDirichlet {
  int node = 0;
  bool position = true;
  bool tangent = true;
  bool rotation = true;
};

/// Dead traction per unit reference area on a face set.
struct SurfaceLoad {
  std::string face_set;
  Vec3 traction = Vec3::Zero();
};

/// Dead load per unit reference length on every element of a beam.
struct LineLoad {
  int beam = 0;
  Vec3 load = Vec3::Zero();
};

struct PointLoad {
  int node = 0;  // beam node
  Vec3 force = Vec3::Zero();
};

struct Model {
  std::string name;
  SolidMesh solid;
  Material material;
  BeamMesh beam;
  std::vector<SolidDirichlet> solid_dirichlet;
  std::vector<BeamDirichlet> beam_dirichlet;
  std::vector<SurfaceLoad> surface_loads;
  std::vector<LineLoad> line_loads;
  std::vector<PointLoad> point_loads;
  CouplingConfig coupling;
  SolveConfig solve;
};

/// Global unknowns: 3 per solid node, then 9 per beam node ordered (r, t, θ).
struct DofMap {
  int solid_nodes = 0;
  int beam_nodes = 0;

  explicit DofMap(const Model& m)
      : solid_nodes(m.solid.node_count()), beam_nodes(m.beam.node_count()) {}
  int size() const { return 3 * solid_nodes + 9 * beam_nodes; }
  int solid(int node, int c) const { return 3 * node + c; }
  int beam(int node, int k) const { return 3 * solid_nodes + 9 * node + k; }
  int beam_position(int node, int c) const { return beam(node, c); }
  int beam_tangent(int node, int c) const { return beam(node, 3 + c); }
  int beam_rotation(int node, int c) const { return beam(node, 6 + c); }
  bool is_rotation(int dof) const {
    return dof >= 3 * solid_nodes && (dof - 3 * solid_nodes) % 9 >= 6;
  }
  std::string describe(int dof) const;
};

struct State {
  Eigen::VectorXd u;                // solid displacements
  std::vector<BeamNodeState> beam;  // current nodal positions, tangents, triads

  static State reference(const Model& m);
  /// Adds an increment in the global layout; rotations are composed from the left.
  void update(const DofMap& dofs, const Eigen::VectorXd& delta);
};

BeamNodeState beam_reference_state(const BeamMesh& mesh, int node);

/// Fixed-dof mask built from the Dirichlet conditions.
std::vector<char> fixed_dofs(const Model& m);

/// Consistency checks; throws ModelError.
void validate(const Model& m);

/// Beam indices taking part in the coupling.
std::vector<int> coupled_beams(const Model& m);

}  // namespace beamtie
