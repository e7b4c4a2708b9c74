#include "beamtie/surface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "beamtie/error.hpp"

namespace beamtie {

namespace {

std::vector<int> corner_key(const LocalFace& lf, const std::vector<int>& element_nodes) {
  const int corners = is_quad(lf.kind) ? 4 : 3;
  std::vector<int> key;
  for (int k = 0; k < corners; ++k) key.push_back(element_nodes[lf.nodes[k]]);
  std::sort(key.begin(), key.end());
  return key;
}

// Unit facet normal at a parent point, differentiated with respect to the
// facet's node coordinates (index 3a + c).
template <int NN>
void facet_normal_derivatives(FacetKind kind, const Eigen::MatrixXd& xf, double xi, double eta,
                              Vec3& value, Eigen::MatrixXd& grad,
                              std::array<Eigen::MatrixXd, 3>& hess) {
  using D = ad::Dual2<3 * NN>;
  const FacetShapeEval s = facet_shape_functions(kind, xi, eta);
  Vec3T<D> xx(D(0.0), D(0.0), D(0.0)), xe(D(0.0), D(0.0), D(0.0));
  for (int a = 0; a < NN; ++a) {
    Vec3T<D> x;
    for (int c = 0; c < 3; ++c) x[c] = D::variable(xf(a, c), 3 * a + c);
    xx += s.dxi[a] * x;
    xe += s.deta[a] * x;
  }
  const Vec3T<D> n = normalized(cross(xx, xe));
  grad.resize(3, 3 * NN);
  for (int c = 0; c < 3; ++c) {
    value[c] = n[c].value();
    hess[c].resize(3 * NN, 3 * NN);
    for (int i = 0; i < 3 * NN; ++i) {
      grad(c, i) = n[c].grad(i);
      for (int j = i; j < 3 * NN; ++j) hess[c](i, j) = hess[c](j, i) = n[c].hess(i, j);
    }
  }
}

void facet_normal_derivatives(FacetKind kind, const Eigen::MatrixXd& xf, double xi, double eta,
                              Vec3& value, Eigen::MatrixXd& grad,
                              std::array<Eigen::MatrixXd, 3>& hess) {
  switch (node_count(kind)) {
    case 3: return facet_normal_derivatives<3>(kind, xf, xi, eta, value, grad, hess);
    case 4: return facet_normal_derivatives<4>(kind, xf, xi, eta, value, grad, hess);
    case 6: return facet_normal_derivatives<6>(kind, xf, xi, eta, value, grad, hess);
    case 8: return facet_normal_derivatives<8>(kind, xf, xi, eta, value, grad, hess);
    case 9: return facet_normal_derivatives<9>(kind, xf, xi, eta, value, grad, hess);
  }
}

// Parent-space distance to the facet boundary, negative outside.
double inside_margin(FacetKind kind, double xi, double eta) {
  if (is_quad(kind)) return std::min(1.0 - std::abs(xi), 1.0 - std::abs(eta));
  return std::min({xi, eta, 1.0 - xi - eta});
}

bool better(const SurfaceMesh& surf, const ProjectionResult& a, const ProjectionResult& b) {
  // smaller |gap| wins; on ties the facet containing the point more deeply, then the lower id
  const double ga = std::abs(a.gap), gb = std::abs(b.gap);
  const double tol = 1e-12 * std::max(1.0, std::max(ga, gb));
  if (std::abs(ga - gb) <= tol) {
    const double ma = inside_margin(surf.facets[a.facet].kind, a.xi, a.eta);
    const double mb = inside_margin(surf.facets[b.facet].kind, b.xi, b.eta);
    if (std::abs(ma - mb) > 1e-14) return ma > mb;
    return a.facet < b.facet;
  }
  return ga < gb;
}

struct Aabb {
  Vec3 lo, hi;
};

template <class Solve>
ProjectionResult search(const Vec3& p, const SurfaceMesh& surf, const SolidMesh& mesh,
                        const Eigen::VectorXd& u, int hint, const ProjectionOptions& opt,
                        Solve&& solve) {
  const int nf = surf.facet_count();
  const double radius = opt.search_radius > 0.0 ? opt.search_radius
                                                : 3.0 * max_facet_diameter(surf, mesh, u);
  std::vector<char> tried(nf, 0);
  ProjectionResult best;
  auto attempt = [&](int f) {
    if (tried[f]) return false;
    tried[f] = 1;
    ProjectionResult r = solve(f, facet_coordinates(mesh, surf.facets[f], u));
    r.facet = f;
    if (!r.converged || !inside_facet(surf.facets[f].kind, r.xi, r.eta, opt.inside_tol) ||
        std::abs(r.gap) > radius)
      return false;
    if (best.facet < 0 || better(surf, r, best)) best = r;
    return true;
  };

  if (hint >= 0 && hint < nf) {
    // hint, then facets within two adjacency rings
    std::deque<std::pair<int, int>> queue{{hint, 0}};
    std::set<int> seen{hint};
    while (!queue.empty()) {
      const auto [f, depth] = queue.front();
      queue.pop_front();
      attempt(f);
      if (depth == 2) continue;
      for (int g : surf.neighbors[f])
        if (seen.insert(g).second) queue.push_back({g, depth + 1});
    }
    if (best.facet >= 0) return best;
  }
  for (int f = 0; f < nf; ++f) {
    if (tried[f]) continue;
    const Eigen::MatrixXd xf = facet_coordinates(mesh, surf.facets[f], u);
    Aabb box{xf.colwise().minCoeff().transpose(), xf.colwise().maxCoeff().transpose()};
    if (((p - box.lo).array() < -radius).any() || ((p - box.hi).array() > radius).any()) continue;
    attempt(f);
  }
  if (best.facet < 0) {
    std::ostringstream os;
    os << "projection failure: no facet accepts point (" << p.x() << ", " << p.y() << ", "
       << p.z() << ")";
    throw ProjectionFailure(os.str());
  }
  return best;
}

}  // namespace

SurfaceMesh extract_surface(const SolidMesh& mesh, const std::vector<std::string>& face_sets) {
  std::map<std::vector<int>, int> face_count;
  for (const auto& el : mesh.elements)
    for (const LocalFace& lf : element_faces(el.kind)) ++face_count[corner_key(lf, el.nodes)];

  std::set<FaceRef> selected;
  for (const std::string& name : face_sets) {
    auto it = mesh.face_sets.find(name);
    if (it == mesh.face_sets.end()) throw ModelError("unknown face set '" + name + "'");
    for (const FaceRef& fr : it->second) {
      if (fr.element < 0 || fr.element >= static_cast<int>(mesh.elements.size()))
        throw ModelError("face set '" + name + "' references a missing element");
      const auto& faces = element_faces(mesh.elements[fr.element].kind);
      if (fr.face < 0 || fr.face >= static_cast<int>(faces.size()))
        throw ModelError("face set '" + name + "' references a missing face");
      selected.insert(fr);
    }
  }

  SurfaceMesh surf;
  surf.surface_index.assign(mesh.X.size(), -1);
  for (const FaceRef& fr : selected) {
    const SolidElement& el = mesh.elements[fr.element];
    const LocalFace& lf = element_faces(el.kind)[fr.face];
    if (face_count[corner_key(lf, el.nodes)] > 1) {
      std::ostringstream os;
      os << "topology error: face " << fr.face << " of element " << fr.element << " is interior";
      throw TopologyError(os.str());
    }
    Facet f{lf.kind, {}, fr};
    for (int k : lf.nodes) f.nodes.push_back(el.nodes[k]);
    const Eigen::MatrixXd Xf = facet_coordinates(mesh, f, {});
    const auto c = facet_center(f.kind);
    const FacetPoint fp = facet_point(f, Xf, c[0], c[1]);
    Vec3 centroid = Vec3::Zero();
    for (int k : el.nodes) centroid += mesh.X[k];
    centroid /= static_cast<double>(el.nodes.size());
    if (!(fp.x_xi.cross(fp.x_eta).dot(fp.x - centroid) > 0.0)) {
      std::ostringstream os;
      os << "topology error: face " << fr.face << " of element " << fr.element
         << " is not outward oriented";
      throw TopologyError(os.str());
    }
    surf.facets.push_back(f);
  }

  std::set<int> nodes;
  for (const Facet& f : surf.facets) nodes.insert(f.nodes.begin(), f.nodes.end());
  surf.nodes.assign(nodes.begin(), nodes.end());
  for (size_t k = 0; k < surf.nodes.size(); ++k) surf.surface_index[surf.nodes[k]] = static_cast<int>(k);
  surf.node_facets.assign(surf.nodes.size(), {});
  for (int f = 0; f < surf.facet_count(); ++f)
    for (int n : surf.facets[f].nodes) surf.node_facets[surf.surface_index[n]].push_back(f);
  surf.neighbors.assign(surf.facets.size(), {});
  for (int f = 0; f < surf.facet_count(); ++f) {
    std::set<int> nb;
    for (int n : surf.facets[f].nodes)
      for (int g : surf.node_facets[surf.surface_index[n]])
        if (g != f) nb.insert(g);
    surf.neighbors[f].assign(nb.begin(), nb.end());
  }
  return surf;
}

Eigen::MatrixXd facet_coordinates(const SolidMesh& mesh, const Facet& f, const Eigen::VectorXd& u) {
  Eigen::MatrixXd x(f.nodes.size(), 3);
  for (size_t a = 0; a < f.nodes.size(); ++a) {
    Vec3 p = mesh.X[f.nodes[a]];
    if (u.size() > 0) p += u.segment<3>(3 * f.nodes[a]);
    x.row(a) = p.transpose();
  }
  return x;
}

FacetPoint facet_point(const Facet& f, const Eigen::MatrixXd& xf, double xi, double eta) {
  const FacetShapeEval s = facet_shape_functions(f.kind, xi, eta);
  return {xf.transpose() * s.N, xf.transpose() * s.dxi, xf.transpose() * s.deta, s.N};
}

Vec3 facet_normal(const Facet& f, const Eigen::MatrixXd& xf, double xi, double eta) {
  const FacetPoint p = facet_point(f, xf, xi, eta);
  return p.x_xi.cross(p.x_eta).normalized();
}

NormalField averaged_normals(const SurfaceMesh& surf, const SolidMesh& mesh,
                             const Eigen::VectorXd& u, int order) {
  const int ns = static_cast<int>(surf.nodes.size());
  NormalField field;
  std::vector<Vec3> sum(ns, Vec3::Zero());

  // per facet and facet node: unit normal and, if needed, its derivatives
  struct Local {
    Vec3 n;
    Eigen::MatrixXd grad;
    std::array<Eigen::MatrixXd, 3> hess;
  };
  std::vector<std::vector<Local>> local(surf.facets.size());
  for (int f = 0; f < surf.facet_count(); ++f) {
    const Facet& facet = surf.facets[f];
    const Eigen::MatrixXd xf = facet_coordinates(mesh, facet, u);
    const auto pn = parent_nodes(facet.kind);
    local[f].resize(facet.nodes.size());
    for (size_t a = 0; a < facet.nodes.size(); ++a) {
      Local& l = local[f][a];
      if (order == 0) {
        const FacetPoint fp = facet_point(facet, xf, pn[a][0], pn[a][1]);
        const Vec3 c = fp.x_xi.cross(fp.x_eta);
        const double len = c.norm();
        if (!(len > 0.0)) throw DegenerateNormal("degenerate facet normal");
        l.n = c / len;
      } else {
        facet_normal_derivatives(facet.kind, xf, pn[a][0], pn[a][1], l.n, l.grad, l.hess);
      }
      sum[surf.surface_index[facet.nodes[a]]] += l.n;
    }
  }

  field.normals.resize(ns);
  for (int k = 0; k < ns; ++k) {
    const double len = sum[k].norm();
    if (!(len > 1e-12)) {
      std::ostringstream os;
      os << "degenerate normal: facet normals cancel at solid node " << surf.nodes[k];
      throw DegenerateNormal(os.str());
    }
    field.normals[k] = sum[k] / len;
  }
  if (order == 0) return field;

  field.derivs.resize(ns);
  for (int k = 0; k < ns; ++k) {
    NodalNormalDerivative& d = field.derivs[k];
    std::set<int> dofs;
    for (int f : surf.node_facets[k])
      for (int n : surf.facets[f].nodes)
        for (int c = 0; c < 3; ++c) dofs.insert(3 * n + c);
    d.dofs.assign(dofs.begin(), dofs.end());
    const int m = static_cast<int>(d.dofs.size());
    std::map<int, int> pos;
    for (int i = 0; i < m; ++i) pos[d.dofs[i]] = i;

    Eigen::MatrixXd Js = Eigen::MatrixXd::Zero(3, m);
    std::array<Eigen::MatrixXd, 3> Hs;
    if (order >= 2)
      for (auto& h : Hs) h = Eigen::MatrixXd::Zero(m, m);
    const int solid_node = surf.nodes[k];
    for (int f : surf.node_facets[k]) {
      const Facet& facet = surf.facets[f];
      const int a = static_cast<int>(std::find(facet.nodes.begin(), facet.nodes.end(), solid_node) -
                                     facet.nodes.begin());
      const Local& l = local[f][a];
      std::vector<int> map(3 * facet.nodes.size());
      for (size_t b = 0; b < facet.nodes.size(); ++b)
        for (int c = 0; c < 3; ++c) map[3 * b + c] = pos[3 * facet.nodes[b] + c];
      for (size_t i = 0; i < map.size(); ++i) {
        Js.col(map[i]) += l.grad.col(i);
        if (order >= 2)
          for (size_t j = 0; j < map.size(); ++j)
            for (int c = 0; c < 3; ++c) Hs[c](map[i], map[j]) += l.hess[c](i, j);
      }
    }
    // chain through a = s / |s|
    using D3 = ad::Dual2<3>;
    Vec3T<D3> s;
    for (int c = 0; c < 3; ++c) s[c] = D3::variable(sum[k][c], c);
    const Vec3T<D3> an = normalized(s);
    Mat3 da;
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < 3; ++j) da(c, j) = an[c].grad(j);
    d.J = da * Js;
    if (order >= 2) {
      for (int c = 0; c < 3; ++c) {
        Mat3 h2;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) h2(i, j) = an[c].hess(i, j);
        d.H[c] = Js.transpose() * h2 * Js;
        for (int j = 0; j < 3; ++j) d.H[c] += da(c, j) * Hs[j];
      }
    }
  }
  return field;
}

Vec3 interpolate_normal(const SurfaceMesh& surf, const NormalField& field, int facet, double xi,
                        double eta) {
  const Facet& f = surf.facets[facet];
  const FacetShapeEval s = facet_shape_functions(f.kind, xi, eta);
  Vec3 n = Vec3::Zero();
  for (size_t k = 0; k < f.nodes.size(); ++k) n += s.N[k] * field.normals[surf.surface_index[f.nodes[k]]];
  const double len = n.norm();
  if (!(len > 0.0)) throw DegenerateNormal("interpolated normal vanishes");
  return n / len;
}

ProjectionResult project_orthogonal_on_facet(const Vec3& p, const Facet& f,
                                             const Eigen::MatrixXd& xf, int max_iterations) {
  using D = ad::Dual2<2>;
  const int n = node_count(f.kind);
  const auto c = facet_center(f.kind);
  double xi = c[0], eta = c[1];
  ProjectionResult r;
  D N[9];
  for (int it = 1; it <= max_iterations; ++it) {
    facet_shape(f.kind, D::variable(xi, 0), D::variable(eta, 1), N);
    D phi(0.0);
    for (int d = 0; d < 3; ++d) {
      D x(0.0);
      for (int k = 0; k < n; ++k) x += N[k] * xf(k, d);
      x -= p[d];
      phi += 0.5 * x * x;
    }
    Eigen::Vector2d g(phi.grad(0), phi.grad(1));
    Eigen::Matrix2d H;
    H << phi.hess(0, 0), phi.hess(0, 1), phi.hess(1, 0), phi.hess(1, 1);
    const Eigen::Vector2d step = H.fullPivLu().solve(-g);
    if (!step.allFinite()) return r;
    xi += step[0];
    eta += step[1];
    r.iterations = it;
    if (std::abs(xi) > 1e3 || std::abs(eta) > 1e3) return r;
    if (step.norm() < 1e-14) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) return r;
  r.xi = xi;
  r.eta = eta;
  const FacetPoint fp = facet_point(f, xf, xi, eta);
  r.point = fp.x;
  r.gap = (p - fp.x).norm();
  return r;
}

ProjectionResult project_normal_on_facet(const Vec3& p, const Facet& f, const Eigen::MatrixXd& xf,
                                         const std::vector<Vec3>& nodal_normals,
                                         int max_iterations) {
  using D = ad::Dual1<2>;
  const int n = node_count(f.kind);
  const auto c = facet_center(f.kind);
  double xi = c[0], eta = c[1], gap = 0.0;
  ProjectionResult r;
  D N[9];
  for (int it = 1; it <= max_iterations + 1; ++it) {
    facet_shape(f.kind, D::variable(xi, 0), D::variable(eta, 1), N);
    Vec3T<D> x(D(0.0), D(0.0), D(0.0)), nh(D(0.0), D(0.0), D(0.0));
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < 3; ++d) {
        x[d] += N[k] * xf(k, d);
        nh[d] += N[k] * nodal_normals[k][d];
      }
    nh = normalized(nh);
    if (it == 1) gap = (p - value(x)).dot(value(nh));
    Eigen::Vector3d res;
    Mat3 Jm;
    for (int d = 0; d < 3; ++d) {
      res[d] = x[d].value() + gap * nh[d].value() - p[d];
      Jm(d, 0) = x[d].grad(0) + gap * nh[d].grad(0);
      Jm(d, 1) = x[d].grad(1) + gap * nh[d].grad(1);
      Jm(d, 2) = nh[d].value();
    }
    const Vec3 step = Jm.fullPivLu().solve(-res);
    if (!step.allFinite() || it > max_iterations) return r;
    xi += step[0];
    eta += step[1];
    gap += step[2];
    r.iterations = it;
    if (std::abs(xi) > 1e3 || std::abs(eta) > 1e3) return r;
    if (step.norm() < 1e-14 * std::max(1.0, std::abs(gap))) {
      r.converged = true;
      break;
    }
  }
  r.xi = xi;
  r.eta = eta;
  r.gap = gap;
  r.point = facet_point(f, xf, xi, eta).x;
  return r;
}

ProjectionResult closest_point_projection(const Vec3& p, const SurfaceMesh& surf,
                                          const SolidMesh& mesh, const Eigen::VectorXd& u,
                                          const NormalField& field, int facet_hint,
                                          const ProjectionOptions& opt) {
  return search(p, surf, mesh, u, facet_hint, opt, [&](int f, const Eigen::MatrixXd& xf) {
    ProjectionResult r = project_orthogonal_on_facet(p, surf.facets[f], xf, opt.max_iterations);
    if (r.converged && (p - r.point).dot(interpolate_normal(surf, field, f, r.xi, r.eta)) < 0.0)
      r.gap = -r.gap;
    return r;
  });
}

ProjectionResult normal_projection(const Vec3& p, const SurfaceMesh& surf, const SolidMesh& mesh,
                                   const Eigen::VectorXd& u, const NormalField& field,
                                   int facet_hint, const ProjectionOptions& opt) {
  return search(p, surf, mesh, u, facet_hint, opt, [&](int f, const Eigen::MatrixXd& xf) {
    std::vector<Vec3> normals;
    for (int n : surf.facets[f].nodes) normals.push_back(field.normals[surf.surface_index[n]]);
    return project_normal_on_facet(p, surf.facets[f], xf, normals, opt.max_iterations);
  });
}

SurfaceTriadData surface_triad_reference(const Facet& f, const Eigen::MatrixXd& Xf, double xi,
                                         double eta, const Triad& beam_ref) {
  const FacetPoint fp = facet_point(f, Xf, xi, eta);
  const Vec3 N = fp.x_xi.cross(fp.x_eta).normalized();
  const Vec3 c = N.cross(Vec3(beam_ref.col(0)));
  if (!(c.norm() > 1e-6))
    throw SingularDirector("singular director: beam axis parallel to the surface normal");
  SurfaceTriadData d;
  d.director0 = c.normalized();
  Eigen::Matrix<double, 3, 2> G;
  G << fp.x_xi, fp.x_eta;
  const Eigen::Vector2d ab = (G.transpose() * G).ldlt().solve(G.transpose() * d.director0);
  d.a = ab[0];
  d.b = ab[1];
  d.tilde0 << d.director0, N, d.director0.cross(N);
  d.beam_ref = beam_ref;
  return d;
}

Triad surface_triad(const SurfaceTriadData& d, const Facet& f, const Eigen::MatrixXd& xf, double xi,
                    double eta) {
  std::vector<Vec3T<double>> x;
  for (int k = 0; k < xf.rows(); ++k) x.emplace_back(Vec3(xf.row(k).transpose()));
  return value(surface_triad<double>(d, f.kind, x, xi, eta));
}

double max_facet_diameter(const SurfaceMesh& surf, const SolidMesh& mesh, const Eigen::VectorXd& u) {
  double dmax = 0.0;
  for (const Facet& f : surf.facets) {
    const Eigen::MatrixXd xf = facet_coordinates(mesh, f, u);
    for (int a = 0; a < xf.rows(); ++a)
      for (int b = a + 1; b < xf.rows(); ++b) dmax = std::max(dmax, (xf.row(a) - xf.row(b)).norm());
  }
  return dmax;
}

}  // namespace beamtie
