#pragma once

// Built-in example models.

#include <functional>
#include <string>
#include <vector>

#include "beamtie/model.hpp"

namespace beamtie {

/// Structured solid over the unit lattice cube mapped by `map`. Face sets
/// "u0", "u1", "v0", "v1", "w0", "w1" and node sets of the same names are added.
/// Tetrahedral kinds split every cell into six tetrahedra.
SolidMesh structured_solid(SolidKind kind, int nu, int nv, int nw,
                           const std::function<Vec3(double, double, double)>& map);

/// Adds a beam through the given reference nodes; triads are transported along
/// the tangents starting from the smallest rotation of e1 onto the first one.
int add_beam(Model& m, const std::string& name, const std::vector<Vec3>& positions,
             const std::vector<Vec3>& tangents, const CrossSection& section);

/// Rotation taking unit vector a onto unit vector b about a × b.
Triad smallest_rotation(const Vec3& a, const Vec3& b);

/// Σ w J over the elements of a beam, the measure the line-load resultant uses.
double beam_load_length(const Model& m, int beam);

struct PatchOptions {
  SolidKind kind = SolidKind::hex8;
  bool curved = false;
  Variant variant = Variant::cons;
  int cells = 3;               // per direction
  bool published_load_factor = false;  // B2 factor kPublishedCurvedLoadFactor
};

/// Constant stress transfer block with two coincident, oppositely loaded beams.
Model patch_model(const PatchOptions& opt);

/// Published load factor of beam B2 for the curved patch.
inline constexpr double kPublishedCurvedLoadFactor = 0.9995346;

/// Own equilibrium factor len(B1)/len(B2) for the curved patch geometry.
double curved_patch_load_factor(const PatchOptions& opt);

/// Patch block with a single beam along the plan line a→b lifted by `gap`
/// along the surface normal; no loads.
Model gap_sample_model(SolidKind kind, bool curved, Variant variant, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b, double gap, int elements = 4);

Model halfpipe_model(Variant variant = Variant::cons);
Model plate_model(bool rotational = true, int nx = 30, int ny = 10, int nz = 2);
Model minimal_model();

/// Names accepted by `generate`: patch_planar_<kind>, patch_curved_<kind>,
/// halfpipe, plate, minimal.
std::vector<std::string> example_names();
Model example_model(const std::string& name);

}  // namespace beamtie
