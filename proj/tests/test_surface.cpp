#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "beamtie/error.hpp"
#include "beamtie/surface.hpp"

using namespace beamtie;

namespace {

// Structured hex8 grid over [0,a]×[0,b]×[0,c]; "top" is the +z face set.
SolidMesh box(int nx, int ny, int nz, double a = 1.0, double b = 1.0, double c = 1.0) {
  SolidMesh m;
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.X.emplace_back(a * i / nx, b * j / ny, c * k / nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int e = static_cast<int>(m.elements.size());
        m.elements.push_back({SolidKind::hex8,
                              {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k),
                               id(i, j, k + 1), id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1),
                               id(i, j + 1, k + 1)}});
        if (k == nz - 1) m.face_sets["top"].push_back({e, 1});
        if (k == 0) m.face_sets["bottom"].push_back({e, 0});
        if (i == nx - 1) m.face_sets["right"].push_back({e, 3});
        if (k == 0 && nz > 1) m.face_sets["inner"].push_back({e, 1});
      }
  return m;
}

// Curved top z = 1.25 − x² − y² over [−0.5, 0.5]², second order when quadratic.
SolidMesh curved_block(int n, SolidKind kind) {
  SolidMesh m;
  const bool quad = kind == SolidKind::hex27;
  const int p = quad ? 2 : 1, nn = n * p, nz = p;
  auto id = [&](int i, int j, int k) { return (k * (nn + 1) + j) * (nn + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= nn; ++j)
      for (int i = 0; i <= nn; ++i) {
        const double x = -0.5 + static_cast<double>(i) / nn, y = -0.5 + static_cast<double>(j) / nn;
        const double top = 1.25 - x * x - y * y;
        m.X.emplace_back(x, y, top * k / nz);
      }
  const auto pn = parent_nodes(kind);
  for (int k = 0; k < 1; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        SolidElement el{kind, {}};
        for (const Vec3& q : pn)
          el.nodes.push_back(id(p * i + static_cast<int>(std::lround((q[0] + 1) * p / 2)),
                                p * j + static_cast<int>(std::lround((q[1] + 1) * p / 2)),
                                static_cast<int>(std::lround((q[2] + 1) * p / 2))));
        m.face_sets["top"].push_back({static_cast<int>(m.elements.size()), 1});
        m.elements.push_back(el);
      }
  return m;
}

// Parent coordinates of a facet node.
std::array<double, 2> node_param(const Facet& f, int node) {
  const auto pn = parent_nodes(f.kind);
  for (size_t a = 0; a < f.nodes.size(); ++a)
    if (f.nodes[a] == node) return pn[a];
  ADD_FAILURE() << "node not in facet";
  return {0, 0};
}

Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> g;
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

}  // namespace

TEST(ExtractSurface, SingleHexTop) {
  const SolidMesh m = box(1, 1, 1);
  const SurfaceMesh s = extract_surface(m, {"top"});
  ASSERT_EQ(s.facet_count(), 1);
  EXPECT_EQ(s.nodes.size(), 4u);
  EXPECT_LT((facet_normal(s.facets[0], facet_coordinates(m, s.facets[0], {}), 0, 0) - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(ExtractSurface, CountsOnStructuredCube) {
  const SolidMesh m = box(2, 2, 2);
  const SurfaceMesh s = extract_surface(m, {"top", "top"});
  EXPECT_EQ(s.facet_count(), 4);
  ASSERT_EQ(s.nodes.size(), 9u);
  std::map<size_t, int> hist;
  for (const auto& nf : s.node_facets) ++hist[nf.size()];
  EXPECT_EQ(hist[1], 4);
  EXPECT_EQ(hist[2], 4);
  EXPECT_EQ(hist[4], 1);
  for (const auto& nb : s.neighbors) EXPECT_EQ(nb.size(), 3u);
}

TEST(ExtractSurface, Errors) {
  const SolidMesh m = box(2, 2, 2);
  EXPECT_THROW(extract_surface(m, {"inner"}), TopologyError);
  try {
    extract_surface(m, {"nowhere"});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("nowhere"), std::string::npos);
  }
}

TEST(ExtractSurface, TetOctantOrientation) {
  // cube split into tets, pushed radially onto a ball octant
  SolidMesh cube = box(2, 2, 2);
  SolidMesh m;
  for (const Vec3& p : cube.X) {
    const double inf = p.cwiseAbs().maxCoeff(), two = p.norm();
    m.X.push_back(two > 0 ? Vec3(p * inf / two) : p);
  }
  const int kuhn[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                          {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};
  for (const auto& h : cube.elements)
    for (const auto& t : kuhn) {
      SolidElement el{SolidKind::tet4, {h.nodes[t[0]], h.nodes[t[1]], h.nodes[t[2]], h.nodes[t[3]]}};
      const Vec3 a = m.X[el.nodes[1]] - m.X[el.nodes[0]], b = m.X[el.nodes[2]] - m.X[el.nodes[0]],
                 c = m.X[el.nodes[3]] - m.X[el.nodes[0]];
      if (a.cross(b).dot(c) < 0) std::swap(el.nodes[1], el.nodes[2]);
      m.elements.push_back(el);
    }
  std::map<std::vector<int>, int> count;
  for (const auto& el : m.elements)
    for (const auto& lf : element_faces(el.kind)) {
      std::vector<int> key;
      for (int k : lf.nodes) key.push_back(el.nodes[k]);
      std::sort(key.begin(), key.end());
      ++count[key];
    }
  for (int e = 0; e < static_cast<int>(m.elements.size()); ++e)
    for (int f = 0; f < 4; ++f) {
      std::vector<int> key;
      for (int k : element_faces(SolidKind::tet4)[f].nodes) key.push_back(m.elements[e].nodes[k]);
      std::sort(key.begin(), key.end());
      if (count[key] == 1) m.face_sets["boundary"].push_back({e, f});
    }
  const SurfaceMesh s = extract_surface(m, {"boundary"});
  EXPECT_EQ(s.facet_count(), 6 * 8);
  for (const Facet& f : s.facets) {
    const Eigen::MatrixXd xf = facet_coordinates(m, f, {});
    Vec3 centroid = Vec3::Zero();
    for (int k : m.elements[f.parent.element].nodes) centroid += m.X[k] / 4.0;
    const Vec3 xc = xf.colwise().mean().transpose();
    EXPECT_GT(facet_normal(f, xf, 1.0 / 3, 1.0 / 3).dot(xc - centroid), 0.0);
  }
}

TEST(AveragedNormals, FlatPlane) {
  const SolidMesh m = box(3, 2, 1);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const NormalField nf = averaged_normals(s, m, {});
  for (const Vec3& n : nf.normals) EXPECT_LT((n - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((interpolate_normal(s, nf, 2, 0.3, -0.7) - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(AveragedNormals, RightAngleEdgeBisector) {
  const SolidMesh m = box(1, 1, 1);
  const SurfaceMesh s = extract_surface(m, {"top", "right"});
  const NormalField nf = averaged_normals(s, m, {});
  const Vec3 bis = Vec3(1, 0, 1).normalized();
  int edge = 0;
  for (size_t k = 0; k < s.nodes.size(); ++k) {
    const Vec3& X = m.X[s.nodes[k]];
    if (std::abs(X.x() - 1) < 1e-14 && std::abs(X.z() - 1) < 1e-14) {
      EXPECT_LT((nf.normals[k] - bis).norm(), 1e-15);
      ++edge;
    }
  }
  EXPECT_EQ(edge, 2);
}

TEST(AveragedNormals, ContinuousAcrossEdges) {
  for (SolidKind kind : {SolidKind::hex8, SolidKind::hex27}) {
    const SolidMesh m = curved_block(3, kind);
    const SurfaceMesh s = extract_surface(m, {"top"});
    const NormalField nf = averaged_normals(s, m, {});
    for (const Vec3& n : nf.normals) EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    int edges = 0;
    for (int f = 0; f < s.facet_count(); ++f)
      for (int g : s.neighbors[f]) {
        if (g <= f) continue;
        std::vector<int> shared;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            if (s.facets[f].nodes[a] == s.facets[g].nodes[b]) shared.push_back(s.facets[f].nodes[a]);
        if (shared.size() != 2) continue;
        ++edges;
        const auto pa = node_param(s.facets[f], shared[0]), pb = node_param(s.facets[f], shared[1]);
        const auto qa = node_param(s.facets[g], shared[0]), qb = node_param(s.facets[g], shared[1]);
        for (int k = 0; k < 10; ++k) {
          const double t = (k + 0.5) / 10.0;
          const Vec3 n1 = interpolate_normal(s, nf, f, pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]));
          const Vec3 n2 = interpolate_normal(s, nf, g, qa[0] + t * (qb[0] - qa[0]), qa[1] + t * (qb[1] - qa[1]));
          EXPECT_LT((n1 - n2).norm(), 1e-13);
        }
      }
    EXPECT_EQ(edges, 12);
  }
}

TEST(AveragedNormals, DerivativesMatchFiniteDifferences) {
  const SolidMesh m = curved_block(2, SolidKind::hex27);
  const SurfaceMesh s = extract_surface(m, {"top"});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  Eigen::VectorXd disp(3 * m.node_count());
  for (int i = 0; i < disp.size(); ++i) disp[i] = u(rng);
  const NormalField nf = averaged_normals(s, m, disp, 2);
  const double h = 1e-5;
  for (int k : {0, 7, 12}) {
    const auto& d = nf.derivs[k];
    for (size_t i = 0; i < d.dofs.size(); i += 5) {
      Eigen::VectorXd p = disp, q = disp;
      p[d.dofs[i]] += h;
      q[d.dofs[i]] -= h;
      const NormalField fp = averaged_normals(s, m, p, 1), fq = averaged_normals(s, m, q, 1);
      const Vec3 fd = (fp.normals[k] - fq.normals[k]) / (2 * h);
      EXPECT_LT((fd - d.J.col(i)).norm(), 1e-7);
      for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXd hd = (fp.derivs[k].J.row(c) - fq.derivs[k].J.row(c)).transpose() / (2 * h);
        EXPECT_LT((hd - d.H[c].col(i)).norm(), 1e-6);
      }
    }
  }
}

TEST(Projection, FlatPlane) {
  const SolidMesh m = box(2, 2, 1);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const NormalField nf = averaged_normals(s, m, {});
  const Vec3 p(0.3, 0.4, 2.0);
  for (const ProjectionResult& r : {closest_point_projection(p, s, m, {}, nf, -1),
                                    normal_projection(p, s, m, {}, nf, 3)}) {
    ASSERT_TRUE(r.converged);
    EXPECT_LT((r.point - Vec3(0.3, 0.4, 1.0)).norm(), 1e-14);
    EXPECT_NEAR(r.gap, 1.0, 1e-14);
  }
  const ProjectionResult below = closest_point_projection(Vec3(0.3, 0.4, 0.8), s, m, {}, nf, -1);
  EXPECT_NEAR(below.gap, -0.2, 1e-14);
}

TEST(Projection, PointOnSurface) {
  const SolidMesh m = curved_block(3, SolidKind::hex27);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const NormalField nf = averaged_normals(s, m, {});
  const int f = 4;
  const Eigen::MatrixXd xf = facet_coordinates(m, s.facets[f], {});
  const Vec3 p = facet_point(s.facets[f], xf, 0.3, -0.45).x;
  const ProjectionResult r = closest_point_projection(p, s, m, {}, nf, f);
  EXPECT_EQ(r.facet, f);
  EXPECT_NEAR(r.xi, 0.3, 1e-12);
  EXPECT_NEAR(r.eta, -0.45, 1e-12);
  EXPECT_NEAR(r.gap, 0.0, 1e-14);
}

TEST(Projection, NormalProjectionSatisfiesOffsetRelation) {
  const SolidMesh m = curved_block(3, SolidKind::hex27);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const NormalField nf = averaged_normals(s, m, {});
  const double x = 0.11, y = -0.27;
  const Vec3 p = Vec3(x, y, 1.25 - x * x - y * y) + 0.05 * Vec3(2 * x, 2 * y, 1).normalized();
  const ProjectionResult r = normal_projection(p, s, m, {}, nf, -1);
  ASSERT_TRUE(r.converged);
  const Vec3 n = interpolate_normal(s, nf, r.facet, r.xi, r.eta);
  EXPECT_LT((p - r.point - r.gap * n).norm(), 1e-10);
  EXPECT_NEAR(r.gap, 0.05, 2e-3);
}

TEST(Projection, BruteForceOptimality) {
  const SolidMesh m = curved_block(3, SolidKind::hex27);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const NormalField nf = averaged_normals(s, m, {});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.4, 0.4), par(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const double x = u(rng), y = u(rng);
    const Vec3 p(x, y, 1.25 - x * x - y * y + 0.1 * (trial + 1) / 5.0);
    const ProjectionResult r = closest_point_projection(p, s, m, {}, nf, -1);
    ASSERT_TRUE(r.converged);
    for (int k = 0; k < 200; ++k) {
      const int f = k % s.facet_count();
      const Vec3 q = facet_point(s.facets[f], facet_coordinates(m, s.facets[f], {}), par(rng), par(rng)).x;
      EXPECT_LE(std::abs(r.gap), (p - q).norm() + 1e-14);
    }
  }
}

TEST(Projection, FailureOutsideRadius) {
  const SolidMesh m = box(1, 1, 1);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const NormalField nf = averaged_normals(s, m, {});
  EXPECT_THROW(closest_point_projection(Vec3(10, 10, 10), s, m, {}, nf, -1), ProjectionFailure);
}

class SurfaceTriadTest : public ::testing::Test {
 protected:
  void SetUp() override {
    m = curved_block(2, SolidKind::hex27);
    s = extract_surface(m, {"top"});
    f = 1;
    const Vec3 tangent = Vec3(1.0, 0.3, -0.2).normalized();
    beam_ref = exp_map(RotationVector(0.4 * tangent)) * smallest_rotation_from_e1(tangent);
    data = surface_triad_reference(s.facets[f], facet_coordinates(m, s.facets[f], {}), xi, eta, beam_ref);
  }
  Triad triad(const Eigen::VectorXd& u) const {
    return surface_triad(data, s.facets[f], facet_coordinates(m, s.facets[f], u), xi, eta);
  }
  SolidMesh m;
  SurfaceMesh s;
  int f = 0;
  double xi = 0.2, eta = -0.6;
  Triad beam_ref;
  SurfaceTriadData data;
};

TEST_F(SurfaceTriadTest, ReferenceReproducesBeamTriad) {
  EXPECT_LT((triad(Eigen::VectorXd::Zero(3 * m.node_count())) - beam_ref).norm(), 1e-14);
  const Eigen::MatrixXd Xf = facet_coordinates(m, s.facets[f], {});
  EXPECT_NEAR(data.director0.dot(facet_normal(s.facets[f], Xf, xi, eta)), 0.0, 1e-14);
  EXPECT_NEAR(data.director0.norm(), 1.0, 1e-15);
}

TEST_F(SurfaceTriadTest, Objectivity) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  Eigen::VectorXd d(3 * m.node_count());
  for (int i = 0; i < d.size(); ++i) d[i] = u(rng);
  const Triad base = triad(d);
  check_rotation(base, 1e-12);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat3 R = exp_map(RotationVector(2.5 * random_unit(rng)));
    const Vec3 c = random_unit(rng);
    Eigen::VectorXd dr(d.size());
    for (int k = 0; k < m.node_count(); ++k) {
      const Vec3 x = m.X[k] + d.segment<3>(3 * k);
      dr.segment<3>(3 * k) = R * x + c - m.X[k];
    }
    EXPECT_LT((triad(dr) - R * base).norm(), 1e-12);
  }
}

TEST_F(SurfaceTriadTest, InteriorDeformationInvariance) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(3 * m.node_count());
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int k = 0; k < m.node_count(); ++k)
    if (s.surface_index[k] < 0) d.segment<3>(3 * k) = Vec3(u(rng), u(rng), u(rng));
  EXPECT_LT((triad(d) - beam_ref).norm(), 1e-14);
}

TEST(SurfaceTriad, RankOneNormalUpdateInvariance) {
  const SolidMesh m = box(2, 2, 1);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const Triad ref = smallest_rotation_from_e1(Vec3(1, 1, 0).normalized());
  const Eigen::MatrixXd Xf = facet_coordinates(m, s.facets[0], {});
  const SurfaceTriadData data = surface_triad_reference(s.facets[0], Xf, 0.1, 0.2, ref);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Mat3 F = Mat3::Identity() + 0.2 * Mat3::Random();
  const Vec3 N(0, 0, 1);
  const Vec3 a(u(rng), u(rng), u(rng));
  Eigen::MatrixXd x1 = Xf, x2 = Xf;
  for (int k = 0; k < Xf.rows(); ++k) {
    x1.row(k) = (F * Xf.row(k).transpose()).transpose();
    x2.row(k) = ((F + a * N.transpose()) * Xf.row(k).transpose()).transpose();
  }
  EXPECT_LT((surface_triad(data, s.facets[0], x1, 0.1, 0.2) - surface_triad(data, s.facets[0], x2, 0.1, 0.2)).norm(), 1e-12);
}

TEST(SurfaceTriad, SingularDirector) {
  const SolidMesh m = box(1, 1, 1);
  const SurfaceMesh s = extract_surface(m, {"top"});
  const Triad ref = smallest_rotation_from_e1(Vec3(0, 0, 1));
  EXPECT_THROW(surface_triad_reference(s.facets[0], facet_coordinates(m, s.facets[0], {}), 0, 0, ref),
               SingularDirector);
}
