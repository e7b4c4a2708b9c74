#include "beamtie/solid_fem.hpp"

#include <cmath>
#include <sstream>

#include "beamtie/error.hpp"

namespace beamtie {

namespace {

const std::vector<Vec3>& hex_nodes27() {
  static const std::vector<Vec3> nodes = {
      {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1}, {-1, -1, 1}, {1, -1, 1},
      {1, 1, 1},    {-1, 1, 1},  {0, -1, -1}, {1, 0, -1}, {0, 1, -1}, {-1, 0, -1},
      {0, -1, 1},   {1, 0, 1},   {0, 1, 1},   {-1, 0, 1}, {-1, -1, 0}, {1, -1, 0},
      {1, 1, 0},    {-1, 1, 0},  {-1, 0, 0},  {1, 0, 0},  {0, -1, 0}, {0, 1, 0},
      {0, 0, -1},   {0, 0, 1},   {0, 0, 0}};
  return nodes;
}

const std::vector<Vec3>& tet_nodes10() {
  static const std::vector<Vec3> nodes = {{0, 0, 0},     {1, 0, 0},     {0, 1, 0},
                                          {0, 0, 1},     {0.5, 0, 0},   {0.5, 0.5, 0},
                                          {0, 0.5, 0},   {0, 0, 0.5},   {0.5, 0, 0.5},
                                          {0, 0.5, 0.5}};
  return nodes;
}

template <class T>
T lagrange3(double node, const T& x) {
  if (node < -0.5) return 0.5 * x * (x - 1.0);
  if (node > 0.5) return 0.5 * x * (x + 1.0);
  return 1.0 - x * x;
}

template <class T>
void solid_shape(SolidKind kind, const T* x, T* N) {
  switch (kind) {
    case SolidKind::hex8: {
      const auto& p = hex_nodes27();
      for (int a = 0; a < 8; ++a)
        N[a] = 0.125 * (1.0 + p[a][0] * x[0]) * (1.0 + p[a][1] * x[1]) * (1.0 + p[a][2] * x[2]);
      return;
    }
    case SolidKind::hex20: {
      const auto& p = hex_nodes27();
      for (int a = 0; a < 20; ++a) {
        const Vec3& q = p[a];
        if (a < 8) {
          N[a] = 0.125 * (1.0 + q[0] * x[0]) * (1.0 + q[1] * x[1]) * (1.0 + q[2] * x[2]) *
                 (q[0] * x[0] + q[1] * x[1] + q[2] * x[2] - 2.0);
        } else {
          T v(0.25);
          for (int d = 0; d < 3; ++d) v = v * (q[d] == 0.0 ? 1.0 - x[d] * x[d] : 1.0 + q[d] * x[d]);
          N[a] = v;
        }
      }
      return;
    }
    case SolidKind::hex27: {
      const auto& p = hex_nodes27();
      for (int a = 0; a < 27; ++a)
        N[a] = lagrange3(p[a][0], x[0]) * lagrange3(p[a][1], x[1]) * lagrange3(p[a][2], x[2]);
      return;
    }
    case SolidKind::tet4:
      N[0] = 1.0 - x[0] - x[1] - x[2];
      N[1] = x[0];
      N[2] = x[1];
      N[3] = x[2];
      return;
    case SolidKind::tet10: {
      const T l[4] = {1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]};
      for (int a = 0; a < 4; ++a) N[a] = l[a] * (2.0 * l[a] - 1.0);
      const int edges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
      for (int k = 0; k < 6; ++k) N[4 + k] = 4.0 * l[edges[k][0]] * l[edges[k][1]];
      return;
    }
  }
}

std::vector<FacetQuadPoint> gauss_square(int n) {
  std::vector<double> x, w;
  if (n == 2) {
    const double g = 1.0 / std::sqrt(3.0);
    x = {-g, g};
    w = {1.0, 1.0};
  } else {
    const double g = std::sqrt(0.6);
    x = {-g, 0.0, g};
    w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  }
  std::vector<FacetQuadPoint> out;
  for (size_t j = 0; j < x.size(); ++j)
    for (size_t i = 0; i < x.size(); ++i) out.push_back({x[i], x[j], w[i] * w[j]});
  return out;
}

std::vector<LocalFace> build_faces(SolidKind kind) {
  static const int hex_corners[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                        {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  static const int hex_centers[6] = {24, 25, 22, 21, 23, 20};
  static const int hex_edges[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                       {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  static const int tet_corners[4][3] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  static const int tet_edges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};

  auto edge_node = [](const int (*edges)[2], int n_edges, int first, int a, int b) {
    for (int k = 0; k < n_edges; ++k)
      if ((edges[k][0] == a && edges[k][1] == b) || (edges[k][0] == b && edges[k][1] == a))
        return first + k;
    return -1;
  };

  std::vector<LocalFace> faces;
  const bool hex = kind == SolidKind::hex8 || kind == SolidKind::hex20 || kind == SolidKind::hex27;
  if (hex) {
    for (int f = 0; f < 6; ++f) {
      LocalFace face;
      face.kind = kind == SolidKind::hex8 ? FacetKind::quad4
                  : kind == SolidKind::hex20 ? FacetKind::quad8
                                             : FacetKind::quad9;
      face.nodes.assign(hex_corners[f], hex_corners[f] + 4);
      if (kind != SolidKind::hex8) {
        for (int k = 0; k < 4; ++k)
          face.nodes.push_back(edge_node(hex_edges, 12, 8, hex_corners[f][k], hex_corners[f][(k + 1) % 4]));
      }
      if (kind == SolidKind::hex27) face.nodes.push_back(hex_centers[f]);
      faces.push_back(face);
    }
  } else {
    for (int f = 0; f < 4; ++f) {
      LocalFace face;
      face.kind = kind == SolidKind::tet4 ? FacetKind::tri3 : FacetKind::tri6;
      face.nodes.assign(tet_corners[f], tet_corners[f] + 3);
      if (kind == SolidKind::tet10) {
        for (int k = 0; k < 3; ++k)
          face.nodes.push_back(edge_node(tet_edges, 6, 4, tet_corners[f][k], tet_corners[f][(k + 1) % 3]));
      }
      faces.push_back(face);
    }
  }
  return faces;
}

}  // namespace

std::string to_string(SolidKind kind) {
  switch (kind) {
    case SolidKind::hex8: return "hex8";
    case SolidKind::hex20: return "hex20";
    case SolidKind::hex27: return "hex27";
    case SolidKind::tet4: return "tet4";
    case SolidKind::tet10: return "tet10";
  }
  return "?";
}

std::string to_string(FacetKind kind) {
  switch (kind) {
    case FacetKind::quad4: return "quad4";
    case FacetKind::quad8: return "quad8";
    case FacetKind::quad9: return "quad9";
    case FacetKind::tri3: return "tri3";
    case FacetKind::tri6: return "tri6";
  }
  return "?";
}

SolidKind solid_kind_from_string(const std::string& name) {
  for (SolidKind k : {SolidKind::hex8, SolidKind::hex20, SolidKind::hex27, SolidKind::tet4,
                      SolidKind::tet10})
    if (to_string(k) == name) return k;
  throw ModelError("unknown element kind '" + name + "'");
}

std::string to_string(MaterialKind kind) {
  return kind == MaterialKind::NeoHookean ? "neo_hookean" : "saint_venant_kirchhoff";
}

MaterialKind material_kind_from_string(const std::string& name) {
  if (name == "neo_hookean") return MaterialKind::NeoHookean;
  if (name == "saint_venant_kirchhoff") return MaterialKind::SaintVenantKirchhoff;
  throw ModelError("unknown material kind '" + name + "'");
}

int node_count(SolidKind kind) {
  switch (kind) {
    case SolidKind::hex8: return 8;
    case SolidKind::hex20: return 20;
    case SolidKind::hex27: return 27;
    case SolidKind::tet4: return 4;
    case SolidKind::tet10: return 10;
  }
  return 0;
}

int node_count(FacetKind kind) {
  switch (kind) {
    case FacetKind::quad4: return 4;
    case FacetKind::quad8: return 8;
    case FacetKind::quad9: return 9;
    case FacetKind::tri3: return 3;
    case FacetKind::tri6: return 6;
  }
  return 0;
}

bool is_quad(FacetKind kind) {
  return kind == FacetKind::quad4 || kind == FacetKind::quad8 || kind == FacetKind::quad9;
}

std::vector<Vec3> parent_nodes(SolidKind kind) {
  const int n = node_count(kind);
  if (kind == SolidKind::tet4 || kind == SolidKind::tet10)
    return {tet_nodes10().begin(), tet_nodes10().begin() + n};
  return {hex_nodes27().begin(), hex_nodes27().begin() + n};
}

std::vector<std::array<double, 2>> parent_nodes(FacetKind kind) {
  switch (kind) {
    case FacetKind::quad4: return {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    case FacetKind::quad8:
      return {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    case FacetKind::quad9:
      return {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}, {0, 0}};
    case FacetKind::tri3: return {{0, 0}, {1, 0}, {0, 1}};
    case FacetKind::tri6: return {{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}};
  }
  return {};
}

ShapeEval shape_functions(SolidKind kind, const Vec3& xi) {
  using D = ad::Dual1<3>;
  const int n = node_count(kind);
  D x[3] = {D::variable(xi[0], 0), D::variable(xi[1], 1), D::variable(xi[2], 2)};
  D N[27];
  solid_shape(kind, x, N);
  ShapeEval out{Eigen::VectorXd(n), Eigen::MatrixXd(n, 3)};
  for (int a = 0; a < n; ++a) {
    out.N[a] = N[a].value();
    for (int d = 0; d < 3; ++d) out.dN(a, d) = N[a].grad(d);
  }
  return out;
}

FacetShapeEval facet_shape_functions(FacetKind kind, double xi, double eta) {
  using D = ad::Dual1<2>;
  const int n = node_count(kind);
  D N[9];
  facet_shape(kind, D::variable(xi, 0), D::variable(eta, 1), N);
  FacetShapeEval out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int a = 0; a < n; ++a) {
    out.N[a] = N[a].value();
    out.dxi[a] = N[a].grad(0);
    out.deta[a] = N[a].grad(1);
  }
  return out;
}

bool inside_facet(FacetKind kind, double xi, double eta, double tol) {
  if (is_quad(kind)) return std::abs(xi) <= 1.0 + tol && std::abs(eta) <= 1.0 + tol;
  return xi >= -tol && eta >= -tol && xi + eta <= 1.0 + tol;
}

std::array<double, 2> facet_center(FacetKind kind) {
  if (is_quad(kind)) return {0.0, 0.0};
  return {1.0 / 3.0, 1.0 / 3.0};
}

std::vector<QuadPoint> quadrature(SolidKind kind) {
  std::vector<QuadPoint> out;
  switch (kind) {
    case SolidKind::hex8:
    case SolidKind::hex20:
    case SolidKind::hex27: {
      std::vector<double> x, w;
      if (kind == SolidKind::hex8) {
        const double g = 1.0 / std::sqrt(3.0);
        x = {-g, g};
        w = {1.0, 1.0};
      } else {
        const double g = std::sqrt(0.6);
        x = {-g, 0.0, g};
        w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      }
      for (size_t k = 0; k < x.size(); ++k)
        for (size_t j = 0; j < x.size(); ++j)
          for (size_t i = 0; i < x.size(); ++i)
            out.push_back({Vec3(x[i], x[j], x[k]), w[i] * w[j] * w[k]});
      break;
    }
    case SolidKind::tet4:
      out.push_back({Vec3(0.25, 0.25, 0.25), 1.0 / 6.0});
      break;
    case SolidKind::tet10: {
      const double a = 0.5854101966249685, b = 0.1381966011250105;
      out.push_back({Vec3(b, b, b), 1.0 / 24.0});
      out.push_back({Vec3(a, b, b), 1.0 / 24.0});
      out.push_back({Vec3(b, a, b), 1.0 / 24.0});
      out.push_back({Vec3(b, b, a), 1.0 / 24.0});
      break;
    }
  }
  return out;
}

std::vector<FacetQuadPoint> facet_quadrature(FacetKind kind) {
  switch (kind) {
    case FacetKind::quad4: return gauss_square(2);
    case FacetKind::quad8:
    case FacetKind::quad9: return gauss_square(3);
    case FacetKind::tri3:
      return {{1.0 / 6, 1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}};
    case FacetKind::tri6: {
      const double a = 0.445948490915965, b = 0.091576213509771;
      const double wa = 0.223381589678011 / 2, wb = 0.109951743655322 / 2;
      return {{a, a, wa}, {1 - 2 * a, a, wa}, {a, 1 - 2 * a, wa},
              {b, b, wb}, {1 - 2 * b, b, wb}, {b, 1 - 2 * b, wb}};
    }
  }
  return {};
}

const std::vector<LocalFace>& element_faces(SolidKind kind) {
  static const std::vector<LocalFace> faces[5] = {
      build_faces(SolidKind::hex8), build_faces(SolidKind::hex20), build_faces(SolidKind::hex27),
      build_faces(SolidKind::tet4), build_faces(SolidKind::tet10)};
  return faces[static_cast<int>(kind)];
}

StressResponse material_response(const Material& mat, const Mat3& F) {
  static const int vi[6] = {0, 1, 2, 1, 0, 0};
  static const int vj[6] = {0, 1, 2, 2, 2, 1};
  const double lam = mat.lambda(), mu = mat.mu();
  const Mat3 C = F.transpose() * F;
  const Mat3 I = Mat3::Identity();
  StressResponse r;
  if (mat.kind == MaterialKind::SaintVenantKirchhoff) {
    const Mat3 E = 0.5 * (C - I);
    const double trE = E.trace();
    r.S = lam * trE * I + 2.0 * mu * E;
    r.energy = 0.5 * lam * trE * trE + mu * (E.array() * E.array()).sum();
    r.C.setZero();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r.C(a, b) = lam;
      r.C(a, a) += 2.0 * mu;
      r.C(a + 3, a + 3) = mu;
    }
    return r;
  }
  const double J = F.determinant();
  if (!(J > 0.0)) {
    std::ostringstream os;
    os << "element inversion: det F = " << J;
    throw ElementInversion(os.str());
  }
  const double lnJ = std::log(J);
  const Mat3 Ci = C.inverse();
  r.S = mu * (I - Ci) + lam * lnJ * Ci;
  r.energy = 0.5 * mu * (C.trace() - 3.0) - mu * lnJ + 0.5 * lam * lnJ * lnJ;
  const double m = mu - lam * lnJ;
  for (int A = 0; A < 6; ++A)
    for (int B = 0; B < 6; ++B) {
      const int i = vi[A], j = vj[A], k = vi[B], l = vj[B];
      r.C(A, B) = lam * Ci(i, j) * Ci(k, l) + m * (Ci(i, k) * Ci(j, l) + Ci(i, l) * Ci(j, k));
    }
  return r;
}

Eigen::MatrixXd element_coordinates(const SolidMesh& mesh, int e) {
  const auto& el = mesh.elements[e];
  Eigen::MatrixXd Xe(el.nodes.size(), 3);
  for (size_t a = 0; a < el.nodes.size(); ++a) Xe.row(a) = mesh.X[el.nodes[a]].transpose();
  return Xe;
}

Eigen::MatrixXd element_coordinates(const SolidMesh& mesh, int e, const Eigen::VectorXd& u) {
  const auto& el = mesh.elements[e];
  Eigen::MatrixXd ue(el.nodes.size(), 3);
  for (size_t a = 0; a < el.nodes.size(); ++a) ue.row(a) = u.segment<3>(3 * el.nodes[a]).transpose();
  return ue;
}

namespace {

struct GaussGeometry {
  Eigen::MatrixXd dNdX;  // n × 3
  double dV;
};

GaussGeometry reference_geometry(SolidKind kind, const Eigen::MatrixXd& Xe, const QuadPoint& q) {
  const ShapeEval s = shape_functions(kind, q.xi);
  const Mat3 J = Xe.transpose() * s.dN;  // J(i, d) = ∂X_i/∂ξ_d
  const double det = J.determinant();
  if (!(det > 1e-14 * std::pow(Xe.norm(), 3) / std::pow(Xe.rows(), 1.5)) || !std::isfinite(det)) {
    std::ostringstream os;
    os << "degenerate element: reference Jacobian determinant " << det;
    throw DegenerateElement(os.str());
  }
  return {s.dN * J.inverse(), det * q.weight};
}

}  // namespace

Mat3 deformation_gradient(const SolidMesh& mesh, int e, const Eigen::VectorXd& u, const Vec3& xi) {
  const auto& el = mesh.elements[e];
  const Eigen::MatrixXd Xe = element_coordinates(mesh, e);
  const Eigen::MatrixXd ue = element_coordinates(mesh, e, u);
  const GaussGeometry g = reference_geometry(el.kind, Xe, {xi, 1.0});
  return Mat3::Identity() + ue.transpose() * g.dNdX;
}

ElementResult internal_force_tangent(SolidKind kind, const Material& mat,
                                     const Eigen::MatrixXd& Xe, const Eigen::MatrixXd& ue,
                                     bool with_tangent) {
  const int n = static_cast<int>(Xe.rows());
  ElementResult r;
  r.residual = Eigen::VectorXd::Zero(3 * n);
  if (with_tangent) r.stiffness = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  Eigen::MatrixXd B(6, 3 * n);
  for (const QuadPoint& q : quadrature(kind)) {
    const GaussGeometry g = reference_geometry(kind, Xe, q);
    const Mat3 F = Mat3::Identity() + ue.transpose() * g.dNdX;
    const StressResponse m = material_response(mat, F);
    r.energy += m.energy * g.dV;
    for (int a = 0; a < n; ++a) {
      const double g0 = g.dNdX(a, 0), g1 = g.dNdX(a, 1), g2 = g.dNdX(a, 2);
      for (int i = 0; i < 3; ++i) {
        const int c = 3 * a + i;
        B(0, c) = F(i, 0) * g0;
        B(1, c) = F(i, 1) * g1;
        B(2, c) = F(i, 2) * g2;
        B(3, c) = F(i, 1) * g2 + F(i, 2) * g1;
        B(4, c) = F(i, 0) * g2 + F(i, 2) * g0;
        B(5, c) = F(i, 0) * g1 + F(i, 1) * g0;
      }
    }
    Voigt6 S;
    S << m.S(0, 0), m.S(1, 1), m.S(2, 2), m.S(1, 2), m.S(0, 2), m.S(0, 1);
    r.residual.noalias() += B.transpose() * S * g.dV;
    if (!with_tangent) continue;
    r.stiffness.noalias() += B.transpose() * (m.C * g.dV) * B;
    const Eigen::MatrixXd SG = g.dNdX * m.S * g.dNdX.transpose() * g.dV;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int i = 0; i < 3; ++i) r.stiffness(3 * a + i, 3 * b + i) += SG(a, b);
  }
  return r;
}

double element_energy(SolidKind kind, const Material& mat, const Eigen::MatrixXd& Xe,
                      const Eigen::MatrixXd& ue) {
  double w = 0.0;
  for (const QuadPoint& q : quadrature(kind)) {
    const GaussGeometry g = reference_geometry(kind, Xe, q);
    const Mat3 F = Mat3::Identity() + ue.transpose() * g.dNdX;
    w += material_response(mat, F).energy * g.dV;
  }
  return w;
}

std::vector<Mat3> quadrature_stresses(SolidKind kind, const Material& mat,
                                      const Eigen::MatrixXd& Xe, const Eigen::MatrixXd& ue) {
  std::vector<Mat3> out;
  for (const QuadPoint& q : quadrature(kind)) {
    const GaussGeometry g = reference_geometry(kind, Xe, q);
    const Mat3 F = Mat3::Identity() + ue.transpose() * g.dNdX;
    out.push_back(material_response(mat, F).S);
  }
  return out;
}

std::vector<Mat3> nodal_stresses(const SolidMesh& mesh, const Material& mat,
                                 const Eigen::VectorXd& u) {
  std::vector<Mat3> sum(mesh.X.size(), Mat3::Zero());
  std::vector<int> count(mesh.X.size(), 0);
  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    const auto& el = mesh.elements[e];
    const auto S = quadrature_stresses(el.kind, mat, element_coordinates(mesh, e),
                                       element_coordinates(mesh, e, u));
    Mat3 mean = Mat3::Zero();
    for (const Mat3& s : S) mean += s;
    mean /= static_cast<double>(S.size());
    for (int k : el.nodes) {
      sum[k] += mean;
      ++count[k];
    }
  }
  for (size_t k = 0; k < sum.size(); ++k)
    if (count[k] > 0) sum[k] /= count[k];
  return sum;
}

Eigen::VectorXd facet_traction_forces(FacetKind kind, const Eigen::MatrixXd& Xf,
                                      const Vec3& traction) {
  const int n = node_count(kind);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(3 * n);
  for (const auto& q : facet_quadrature(kind)) {
    const FacetShapeEval s = facet_shape_functions(kind, q.xi, q.eta);
    const Vec3 a = Xf.transpose() * s.dxi;
    const Vec3 b = Xf.transpose() * s.deta;
    const double dA = a.cross(b).norm() * q.weight;
    for (int k = 0; k < n; ++k) f.segment<3>(3 * k) += s.N[k] * dA * traction;
  }
  return f;
}

}  // namespace beamtie
