#pragma once

// Isoparametric solid elements (VTK node ordering), hyperelastic materials and
// total Lagrangian element kernels.

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beamtie/autodiff.hpp"
#include "beamtie/small_matrix.hpp"

namespace beamtie {

enum class SolidKind { hex8, hex20, hex27, tet4, tet10 };
enum class FacetKind { quad4, quad8, quad9, tri3, tri6 };

std::string to_string(SolidKind kind);
std::string to_string(FacetKind kind);
SolidKind solid_kind_from_string(const std::string& name);

int node_count(SolidKind kind);
int node_count(FacetKind kind);
bool is_quad(FacetKind kind);

/// Parent coordinates of the element nodes.
std::vector<Vec3> parent_nodes(SolidKind kind);
/// Parent coordinates (ξ, η) of the facet nodes.
std::vector<std::array<double, 2>> parent_nodes(FacetKind kind);

struct ShapeEval {
  Eigen::VectorXd N;
  Eigen::MatrixXd dN;  // n × 3 parent gradients
};

ShapeEval shape_functions(SolidKind kind, const Vec3& xi);

/// Facet shape functions over any scalar type; N must hold node_count(kind) entries.
template <class T>
void facet_shape(FacetKind kind, const T& xi, const T& eta, T* N) {
  switch (kind) {
    case FacetKind::quad4: {
      const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
      for (int a = 0; a < 4; ++a) N[a] = 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta);
      return;
    }
    case FacetKind::quad8: {
      const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
      for (int a = 0; a < 4; ++a)
        N[a] = 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta) * (sx[a] * xi + sy[a] * eta - 1.0);
      N[4] = 0.5 * (1.0 - xi * xi) * (1.0 - eta);
      N[5] = 0.5 * (1.0 + xi) * (1.0 - eta * eta);
      N[6] = 0.5 * (1.0 - xi * xi) * (1.0 + eta);
      N[7] = 0.5 * (1.0 - xi) * (1.0 - eta * eta);
      return;
    }
    case FacetKind::quad9: {
      const T lx[3] = {0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)};
      const T ly[3] = {0.5 * eta * (eta - 1.0), 1.0 - eta * eta, 0.5 * eta * (eta + 1.0)};
      const int ix[9] = {0, 2, 2, 0, 1, 2, 1, 0, 1};
      const int iy[9] = {0, 0, 2, 2, 0, 1, 2, 1, 1};
      for (int a = 0; a < 9; ++a) N[a] = lx[ix[a]] * ly[iy[a]];
      return;
    }
    case FacetKind::tri3:
      N[0] = 1.0 - xi - eta;
      N[1] = xi;
      N[2] = eta;
      return;
    case FacetKind::tri6: {
      const T l0 = 1.0 - xi - eta;
      N[0] = l0 * (2.0 * l0 - 1.0);
      N[1] = xi * (2.0 * xi - 1.0);
      N[2] = eta * (2.0 * eta - 1.0);
      N[3] = 4.0 * l0 * xi;
      N[4] = 4.0 * xi * eta;
      N[5] = 4.0 * eta * l0;
      return;
    }
  }
}

struct FacetShapeEval {
  Eigen::VectorXd N, dxi, deta;
};

FacetShapeEval facet_shape_functions(FacetKind kind, double xi, double eta);

/// True if (ξ, η) lies in the facet parameter domain enlarged by tol.
bool inside_facet(FacetKind kind, double xi, double eta, double tol);
/// Parameter coordinates of the facet centroid.
std::array<double, 2> facet_center(FacetKind kind);

struct QuadPoint {
  Vec3 xi;
  double weight;
};
struct FacetQuadPoint {
  double xi, eta, weight;
};

std::vector<QuadPoint> quadrature(SolidKind kind);
std::vector<FacetQuadPoint> facet_quadrature(FacetKind kind);

/// Boundary faces of an element: local node lists ordered as facet nodes with
/// outward normal X_ξ × X_η.
struct LocalFace {
  FacetKind kind;
  std::vector<int> nodes;
};
const std::vector<LocalFace>& element_faces(SolidKind kind);

enum class MaterialKind { SaintVenantKirchhoff, NeoHookean };

struct Material {
  MaterialKind kind = MaterialKind::SaintVenantKirchhoff;
  double E = 1.0;
  double nu = 0.0;

  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double mu() const { return E / (2.0 * (1.0 + nu)); }
};

std::string to_string(MaterialKind kind);
MaterialKind material_kind_from_string(const std::string& name);

using Voigt6 = Eigen::Matrix<double, 6, 1>;
using Voigt66 = Eigen::Matrix<double, 6, 6>;

struct StressResponse {
  double energy = 0.0;
  Mat3 S;
  Voigt66 C;
};

/// Energy density, second Piola–Kirchhoff stress and material tangent at F.
StressResponse material_response(const Material& mat, const Mat3& F);

struct SolidElement {
  SolidKind kind;
  std::vector<int> nodes;
};

struct FaceRef {
  int element;
  int face;
  bool operator<(const FaceRef& o) const {
    return element != o.element ? element < o.element : face < o.face;
  }
  bool operator==(const FaceRef& o) const = default;
};

struct SolidMesh {
  std::vector<Vec3> X;
  std::vector<SolidElement> elements;
  std::map<std::string, std::vector<FaceRef>> face_sets;
  std::map<std::string, std::vector<int>> node_sets;

  int node_count() const { return static_cast<int>(X.size()); }
};

/// Element nodal coordinates as an n × 3 matrix.
Eigen::MatrixXd element_coordinates(const SolidMesh& mesh, int e);
Eigen::MatrixXd element_coordinates(const SolidMesh& mesh, int e, const Eigen::VectorXd& u);

/// F = ∂x/∂X at parent point xi; u holds 3 values per mesh node.
Mat3 deformation_gradient(const SolidMesh& mesh, int e, const Eigen::VectorXd& u, const Vec3& xi);

struct ElementResult {
  double energy = 0.0;
  Eigen::VectorXd residual;
  Eigen::MatrixXd stiffness;
};

/// Internal energy, force and consistent tangent; Xe and ue are n × 3.
ElementResult internal_force_tangent(SolidKind kind, const Material& mat,
                                     const Eigen::MatrixXd& Xe, const Eigen::MatrixXd& ue,
                                     bool with_tangent = true);

/// Element energy only.
double element_energy(SolidKind kind, const Material& mat, const Eigen::MatrixXd& Xe,
                      const Eigen::MatrixXd& ue);

/// Second Piola–Kirchhoff stress at each quadrature point.
std::vector<Mat3> quadrature_stresses(SolidKind kind, const Material& mat,
                                      const Eigen::MatrixXd& Xe, const Eigen::MatrixXd& ue);

/// Quadrature-point stresses averaged per element, then per node.
std::vector<Mat3> nodal_stresses(const SolidMesh& mesh, const Material& mat,
                                 const Eigen::VectorXd& u);

/// Consistent nodal forces of a dead traction on the reference facet.
Eigen::VectorXd facet_traction_forces(FacetKind kind, const Eigen::MatrixXd& Xf,
                                      const Vec3& traction);

}  // namespace beamtie
