#pragma once

// Global assembly of the penalty-condensed system.

#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "beamtie/model.hpp"
#include "beamtie/mortar.hpp"

namespace beamtie {

/// Everything computed once per model: dof layout, supports, beam geometry,
/// reference load vector and the frozen mortar segmentation.
struct Problem {
  const Model* model = nullptr;
  DofMap dofs;
  std::vector<char> fixed;
  std::vector<BeamElementGeometry> beam_geometry;
  Eigen::VectorXd external;  // at load factor 1
  std::optional<MortarSetup> mortar;

  explicit Problem(const Model& m);
  bool coupled() const { return mortar.has_value(); }
};

/// Consistent nodal loads of all dead loads at load factor 1.
Eigen::VectorXd external_forces(const Model& m, const std::vector<BeamElementGeometry>& geometry);

struct Energies {
  double solid = 0.0;
  double beam = 0.0;
  double penalty_positional = 0.0;
  double penalty_rotational = 0.0;
  double external_work = 0.0;

  double internal() const { return solid + beam + penalty_positional + penalty_rotational; }
  double total() const { return internal() - external_work; }
};

struct AssembledSystem {
  Energies energy;
  Eigen::VectorXd residual;           // internal + coupling − external
  Eigen::VectorXd coupling_gradient;  // coupling forces alone
  Eigen::SparseMatrix<double> tangent;
  std::optional<MortarData> mortar;
};

AssembledSystem assemble(const Problem& p, const State& s, double load_factor,
                         bool with_tangent = true);

/// Displacement-like vector (solid u, beam r − r0 and t − t0, zero rotations).
Eigen::VectorXd displacement_vector(const Problem& p, const State& s);

/// Euclidean norm over the free entries.
double free_norm(const Problem& p, const Eigen::VectorXd& v);

}  // namespace beamtie
