#pragma once

// Numerical checks shared by the tests, the acceptance runner and the CLI.

#include <random>

#include "beamtie/assembly.hpp"
#include "beamtie/generators.hpp"

namespace beamtie {

struct TangentCheck {
  double max_rel_error = 0.0;  // max |K − K_fd| / max |K| over free entries
  int row = -1, col = -1;      // worst entry
  int unknowns = 0;
};

/// Central differences of the residual, rotations perturbed multiplicatively.
TangentCheck tangent_check(const Problem& p, const State& s, double load_factor, double h = 1e-6);

/// Reference state plus uniform noise on free unknowns; rotations are perturbed
/// by exp of a random vector with components in [−rot_amplitude, rot_amplitude].
State random_state(const Problem& p, std::mt19937_64& rng, double amplitude, double rot_amplitude);

struct ConservationSample {
  int index = 0;
  SolidKind kind = SolidKind::hex8;
  bool curved = false;
  double gap = 0.0;
  ConservationAudit cons, disp;
  double cons_force_ratio = 0.0;   // |F| / (max|λ| L)
  double cons_moment_ratio = 0.0;  // |M| / (max|λ| L)
  double disp_moment_ratio = 0.0;  // |M| / (max|λ| g L)
};

/// Randomized coupling configurations: hex8 and tet4 surfaces alternate, gaps
/// in (0, 2R], random beam line and random admissible state; CONS and DISP are
/// audited on the same geometry and state.
std::vector<ConservationSample> conservation_suite(int count, std::uint64_t seed);

/// Largest |Ω| at the Gauss points and midpoints of all beam elements.
double max_beam_curvature(const Problem& p, const State& s);

/// Largest |S_33| over the recovered nodal stresses.
double max_abs_s33(const Model& m, const State& s);

/// Largest nodal ‖u‖ of the solid.
double max_solid_displacement(const State& s);

/// Mean of a displacement component over all beam nodes.
double mean_beam_displacement(const Model& m, const State& s, int component);

}  // namespace beamtie
