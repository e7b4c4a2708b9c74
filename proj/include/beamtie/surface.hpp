#pragma once

// Solid surface facets, the averaged nodal normal field, projections of beam
// points onto the surface and the surface triad.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamtie/so3.hpp"
#include "beamtie/solid_fem.hpp"

namespace beamtie {

struct Facet {
  FacetKind kind;
  std::vector<int> nodes;  // solid node ids
  FaceRef parent;
};

struct SurfaceMesh {
  std::vector<Facet> facets;
  std::vector<int> nodes;                      // solid node id per surface node
  std::vector<int> surface_index;              // solid node id -> surface node or -1
  std::vector<std::vector<int>> node_facets;   // adjacent facets per surface node
  std::vector<std::vector<int>> neighbors;     // facets sharing a node, per facet

  int facet_count() const { return static_cast<int>(facets.size()); }
};

/// Collects the boundary faces named by the face sets.
SurfaceMesh extract_surface(const SolidMesh& mesh, const std::vector<std::string>& face_sets);

/// Current nodal coordinates of a facet (n × 3); u may be empty.
Eigen::MatrixXd facet_coordinates(const SolidMesh& mesh, const Facet& f, const Eigen::VectorXd& u);

/// Point and parameter derivatives of the facet map.
struct FacetPoint {
  Vec3 x, x_xi, x_eta;
  Eigen::VectorXd N;
};
FacetPoint facet_point(const Facet& f, const Eigen::MatrixXd& xf, double xi, double eta);

/// Unit normal of the facet map at (ξ, η).
Vec3 facet_normal(const Facet& f, const Eigen::MatrixXd& xf, double xi, double eta);

/// Derivatives of an averaged nodal normal with respect to the displacement
/// dofs of the facets around the node.
struct NodalNormalDerivative {
  std::vector<int> dofs;                 // global solid dof ids, length m
  Eigen::MatrixXd J;                     // 3 × m
  std::array<Eigen::MatrixXd, 3> H;      // m × m per component
};

struct NormalField {
  std::vector<Vec3> normals;                   // per surface node
  std::vector<NodalNormalDerivative> derivs;   // filled when requested
};

/// order 0: values only; 1: plus first derivatives; 2: plus second derivatives.
NormalField averaged_normals(const SurfaceMesh& surf, const SolidMesh& mesh,
                             const Eigen::VectorXd& u, int order = 0);

/// normalize(Σ N_k a_k) over the facet's nodes.
Vec3 interpolate_normal(const SurfaceMesh& surf, const NormalField& field, int facet,
                        double xi, double eta);

struct ProjectionResult {
  int facet = -1;
  double xi = 0.0, eta = 0.0;
  double gap = 0.0;  // signed, positive on the outward side
  Vec3 point = Vec3::Zero();
  bool converged = false;
  int iterations = 0;
};

struct ProjectionOptions {
  double inside_tol = 1e-8;
  double search_radius = -1.0;  // < 0: three times the largest facet diameter
  int max_iterations = 20;
};

/// Orthogonal projection onto the facet geometry; gap sign from the averaged normal.
ProjectionResult closest_point_projection(const Vec3& p, const SurfaceMesh& surf,
                                          const SolidMesh& mesh, const Eigen::VectorXd& u,
                                          const NormalField& field, int facet_hint,
                                          const ProjectionOptions& opt = {});

/// Projection along the averaged normal field: solves x(ξ,η) + g n_h(ξ,η) = p.
ProjectionResult normal_projection(const Vec3& p, const SurfaceMesh& surf,
                                   const SolidMesh& mesh, const Eigen::VectorXd& u,
                                   const NormalField& field, int facet_hint,
                                   const ProjectionOptions& opt = {});

/// Single-facet solves; return converged=false if Newton fails.
ProjectionResult project_orthogonal_on_facet(const Vec3& p, const Facet& f,
                                             const Eigen::MatrixXd& xf, int max_iterations);
ProjectionResult project_normal_on_facet(const Vec3& p, const Facet& f, const Eigen::MatrixXd& xf,
                                         const std::vector<Vec3>& nodal_normals,
                                         int max_iterations);

/// Reference data of the surface triad at one coupling point.
struct SurfaceTriadData {
  Vec3 director0;      // g̃0
  double a = 0.0;      // g̃0 = a X_ξ + b X_η
  double b = 0.0;
  Triad tilde0;        // [g̃0, N, g̃0 × N]
  Triad beam_ref;      // Λ_B,0 at the point
};

SurfaceTriadData surface_triad_reference(const Facet& f, const Eigen::MatrixXd& Xf, double xi,
                                         double eta, const Triad& beam_ref);

/// Λ_Γ = [g̃, n, g̃ × n] Λ̃_Γ0ᵀ Λ_B,0 for any scalar type; x holds the current
/// facet node positions.
template <class T>
Mat3T<T> surface_triad(const SurfaceTriadData& d, FacetKind kind, const std::vector<Vec3T<T>>& x,
                       double xi, double eta) {
  const FacetShapeEval s = facet_shape_functions(kind, xi, eta);
  Vec3T<T> xx, xe;
  for (int c = 0; c < 3; ++c) {
    xx[c] = T(0.0);
    xe[c] = T(0.0);
  }
  for (size_t k = 0; k < x.size(); ++k) {
    xx += s.dxi[k] * x[k];
    xe += s.deta[k] * x[k];
  }
  const Vec3T<T> n = normalized(cross(xx, xe));
  const Vec3T<T> g = normalized(d.a * xx + d.b * xe);
  const Mat3T<T> tilde = Mat3T<T>::from_columns(g, n, cross(g, n));
  const Mat3 fixed = d.tilde0.transpose() * d.beam_ref;
  if constexpr (std::is_same_v<T, double>) {
    return Mat3T<double>(value(tilde) * fixed);
  } else {
    return tilde * fixed;
  }
}

Triad surface_triad(const SurfaceTriadData& d, const Facet& f, const Eigen::MatrixXd& xf, double xi,
                    double eta);

/// Largest facet diameter in the current configuration.
double max_facet_diameter(const SurfaceMesh& surf, const SolidMesh& mesh, const Eigen::VectorXd& u);

}  // namespace beamtie
