#include "beamtie/generators.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "beamtie/error.hpp"

namespace beamtie {

namespace {

int order_of(SolidKind kind) {
  return kind == SolidKind::hex8 || kind == SolidKind::tet4 ? 1 : 2;
}

constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kKuhn[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                             {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};
constexpr int kTetEdges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};

using Lattice = std::array<int, 3>;

}  // namespace

SolidMesh structured_solid(SolidKind kind, int nu, int nv, int nw,
                           const std::function<Vec3(double, double, double)>& map) {
  const int p = order_of(kind);
  const Lattice size{p * nu, p * nv, p * nw};
  SolidMesh mesh;
  std::map<Lattice, int> ids;
  std::vector<Lattice> where;
  auto node = [&](const Lattice& l) {
    auto [it, fresh] = ids.emplace(l, static_cast<int>(mesh.X.size()));
    if (fresh) {
      mesh.X.push_back(map(static_cast<double>(l[0]) / size[0], static_cast<double>(l[1]) / size[1],
                           static_cast<double>(l[2]) / size[2]));
      where.push_back(l);
    }
    return it->second;
  };

  const bool tet = kind == SolidKind::tet4 || kind == SolidKind::tet10;
  for (int k = 0; k < nw; ++k)
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) {
        const Lattice base{p * i, p * j, p * k};
        if (!tet) {
          SolidElement el{kind, {}};
          for (const Vec3& q : parent_nodes(kind)) {
            Lattice l = base;
            for (int d = 0; d < 3; ++d) l[d] += static_cast<int>(std::lround((q[d] + 1.0) * 0.5 * p));
            el.nodes.push_back(node(l));
          }
          mesh.elements.push_back(el);
          continue;
        }
        for (const auto& t : kKuhn) {
          std::array<Lattice, 4> c;
          for (int a = 0; a < 4; ++a)
            for (int d = 0; d < 3; ++d) c[a][d] = base[d] + p * kCorner[t[a]][d];
          auto pos = [&](const Lattice& l) {
            return map(static_cast<double>(l[0]) / size[0], static_cast<double>(l[1]) / size[1],
                       static_cast<double>(l[2]) / size[2]);
          };
          const Vec3 x0 = pos(c[0]);
          if ((pos(c[1]) - x0).cross(pos(c[2]) - x0).dot(pos(c[3]) - x0) < 0.0) std::swap(c[1], c[2]);
          SolidElement el{kind, {}};
          for (int a = 0; a < 4; ++a) el.nodes.push_back(node(c[a]));
          if (kind == SolidKind::tet10)
            for (const auto& e : kTetEdges) {
              Lattice mid;
              for (int d = 0; d < 3; ++d) mid[d] = (c[e[0]][d] + c[e[1]][d]) / 2;
              el.nodes.push_back(node(mid));
            }
          mesh.elements.push_back(el);
        }
      }

  static const char* names[3][2] = {{"u0", "u1"}, {"v0", "v1"}, {"w0", "w1"}};
  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    const auto& faces = element_faces(kind);
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      const int corners = is_quad(faces[f].kind) ? 4 : 3;
      for (int d = 0; d < 3; ++d)
        for (int side = 0; side < 2; ++side) {
          const int target = side ? size[d] : 0;
          bool all = true;
          for (int a = 0; a < corners && all; ++a)
            all = where[mesh.elements[e].nodes[faces[f].nodes[a]]][d] == target;
          if (all) mesh.face_sets[names[d][side]].push_back({e, f});
        }
    }
  }
  for (int n = 0; n < mesh.node_count(); ++n)
    for (int d = 0; d < 3; ++d) {
      if (where[n][d] == 0) mesh.node_sets[names[d][0]].push_back(n);
      if (where[n][d] == size[d]) mesh.node_sets[names[d][1]].push_back(n);
    }
  return mesh;
}

Triad smallest_rotation(const Vec3& a, const Vec3& b) {
  const Vec3 c = a.cross(b);
  const double s = c.norm(), co = a.dot(b);
  if (s < 1e-300) {
    if (co > 0.0) return Mat3::Identity();
    throw Error("smallest rotation undefined for opposite vectors");
  }
  return exp_map(RotationVector(c / s * std::atan2(s, co)));
}

int add_beam(Model& m, const std::string& name, const std::vector<Vec3>& positions,
             const std::vector<Vec3>& tangents, const CrossSection& section) {
  const int section_id = static_cast<int>(m.beam.sections.size());
  m.beam.sections.push_back(section);
  const int first = m.beam.node_count();
  Triad triad = smallest_rotation_from_e1(tangents[0].normalized());
  for (size_t k = 0; k < positions.size(); ++k) {
    const Vec3 t = tangents[k].normalized();
    if (k > 0) triad = smallest_rotation(Vec3(triad.col(0)), t) * triad;
    m.beam.nodes.push_back({positions[k], t, triad});
  }
  Beam beam{name, {}};
  for (size_t k = 0; k + 1 < positions.size(); ++k) {
    beam.elements.push_back(static_cast<int>(m.beam.elements.size()));
    m.beam.elements.push_back({{first + static_cast<int>(k), first + static_cast<int>(k) + 1}, 0.0, section_id});
  }
  m.beam.beams.push_back(beam);
  finalize_beam_mesh(m.beam);
  return static_cast<int>(m.beam.beams.size()) - 1;
}

double beam_load_length(const Model& m, int beam) {
  double len = 0.0;
  for (int e : m.beam.beams[beam].elements) {
    const BeamElementGeometry g = beam_geometry(m.beam, e);
    for (size_t q = 0; q < g.w.size(); ++q) len += g.w[q] * g.J[q];
  }
  return len;
}

namespace {

constexpr double kPatchRadius = 0.05;

double patch_top(bool curved, double x, double y) { return curved ? 1.25 - x * x - y * y : 1.2; }

// Beam centerline over the top face: a skew line in plan, lifted by R along the surface normal.
void patch_beam_nodes(bool curved, int elements, std::vector<Vec3>& r, std::vector<Vec3>& t,
                      const Eigen::Vector2d& a = {-0.45, -0.3}, const Eigen::Vector2d& b = {0.4, 0.35},
                      double gap = kPatchRadius) {
  r.clear();
  t.clear();
  for (int k = 0; k <= elements; ++k) {
    const double s = static_cast<double>(k) / elements;
    const Eigen::Vector2d xy = a + s * (b - a), dxy = b - a;
    const double x = xy.x(), y = xy.y();
    if (!curved) {
      r.emplace_back(x, y, 1.2 + gap);
      t.emplace_back(Vec3(dxy.x(), dxy.y(), 0.0).normalized());
      continue;
    }
    // point X(x,y) + R n(x,y) with n = (2x, 2y, 1)/w
    const double w = std::sqrt(4 * x * x + 4 * y * y + 1);
    const Vec3 n = Vec3(2 * x, 2 * y, 1) / w;
    r.push_back(Vec3(x, y, patch_top(true, x, y)) + gap * n);
    const Vec3 dX(dxy.x(), dxy.y(), -2 * x * dxy.x() - 2 * y * dxy.y());
    const Vec3 dnum(2 * dxy.x(), 2 * dxy.y(), 0.0);
    const double dw = (4 * x * dxy.x() + 4 * y * dxy.y()) / w;
    const Vec3 dn = (dnum * w - Vec3(2 * x, 2 * y, 1) * dw) / (w * w);
    t.push_back((dX + gap * dn).normalized());
  }
}

SolidMesh patch_block(SolidKind kind, bool curved, int cells) {
  return structured_solid(kind, cells, cells, cells, [curved](double u, double v, double w) {
    const double x = u - 0.5, y = v - 0.5;
    return Vec3(x, y, w * patch_top(curved, x, y));
  });
}

Model patch_geometry(const PatchOptions& opt) {
  Model m;
  m.name = std::string(opt.curved ? "patch_curved_" : "patch_planar_") + to_string(opt.kind);
  const bool curved = opt.curved;
  m.solid = patch_block(opt.kind, curved, opt.cells);
  m.material = {MaterialKind::SaintVenantKirchhoff, 1.0, 0.0};
  const CrossSection cs{kPatchRadius, 100.0, 0.0};
  std::vector<Vec3> r, t;
  patch_beam_nodes(curved, 5, r, t);
  add_beam(m, "B1", r, t, cs);
  patch_beam_nodes(curved, 7, r, t);
  add_beam(m, "B2", r, t, cs);
  return m;
}

}  // namespace

double curved_patch_load_factor(const PatchOptions& opt) {
  const Model m = patch_geometry(opt);
  return beam_load_length(m, 0) / beam_load_length(m, 1);
}

Model patch_model(const PatchOptions& opt) {
  Model m = patch_geometry(opt);
  m.solid_dirichlet.push_back({"w0", {true, true, true}});
  const double t = 0.025;
  double factor = 1.0;
  if (opt.curved)
    factor = opt.published_load_factor ? kPublishedCurvedLoadFactor : beam_load_length(m, 0) / beam_load_length(m, 1);
  m.line_loads.push_back({0, Vec3(0, 0, t)});
  m.line_loads.push_back({1, Vec3(0, 0, -t * factor)});
  m.coupling.variant = opt.variant;
  m.coupling.eps_r = 100.0;
  m.coupling.eps_theta = 0.1;
  m.coupling.face_sets = {"w1"};
  m.solve.steps = 1;
  return m;
}

Model gap_sample_model(SolidKind kind, bool curved, Variant variant, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b, double gap, int elements) {
  Model m;
  m.name = "gap_sample";
  m.solid = patch_block(kind, curved, 3);
  m.material = {MaterialKind::SaintVenantKirchhoff, 1.0, 0.0};
  std::vector<Vec3> r, t;
  patch_beam_nodes(curved, elements, r, t, a, b, gap);
  add_beam(m, "B", r, t, {kPatchRadius, 100.0, 0.0});
  m.solid_dirichlet.push_back({"w0", {true, true, true}});
  m.coupling.variant = variant;
  m.coupling.face_sets = {"w1"};
  return m;
}

Model halfpipe_model(Variant variant) {
  Model m;
  m.name = "halfpipe";
  // u radial 0.8..1, v axial 0..1 along e2, w angle 0..π
  m.solid = structured_solid(SolidKind::hex8, 2, 4, 12, [](double u, double v, double w) {
    const double r = 0.8 + 0.2 * u, phi = std::numbers::pi * w;
    return Vec3(r * std::cos(phi), v, r * std::sin(phi));
  });
  m.material = {MaterialKind::NeoHookean, 1.0, 0.0};
  const double rb = 1.05, pitch = 2.0;
  const int elements = 10;
  std::vector<Vec3> r, t;
  for (int k = 0; k <= elements; ++k) {
    const double phi = std::numbers::pi * k / elements;
    const double y = pitch * phi / (2 * std::numbers::pi);
    r.emplace_back(rb * std::cos(phi), y, rb * std::sin(phi));
    t.emplace_back(Vec3(-rb * std::sin(phi), pitch / (2 * std::numbers::pi), rb * std::cos(phi)).normalized());
  }
  add_beam(m, "helix", r, t, {0.1, 50.0, 0.0});
  m.solid_dirichlet.push_back({"v0", {true, true, true}});
  m.point_loads.push_back({elements, Vec3(0, 0, 0.0004)});
  m.coupling.variant = variant;
  m.coupling.eps_r = 10.0;
  m.coupling.eps_theta = 1.0;
  m.coupling.face_sets = {"u1"};
  return m;
}

Model plate_model(bool rotational, int nx, int ny, int nz) {
  Model m;
  m.name = "plate";
  m.solid = structured_solid(SolidKind::hex8, nx, ny, nz, [](double u, double v, double w) {
    return Vec3(3.0 * u, v, 0.1 * w);
  });
  m.material = {MaterialKind::NeoHookean, 1.0, 0.0};
  const double R = 0.075;
  const int elements = 10;
  std::vector<Vec3> r, t;
  for (int k = 0; k <= elements; ++k) {
    r.emplace_back(3.0 * k / elements, 0.85, 0.1 + R);
    t.emplace_back(1, 0, 0);
  }
  add_beam(m, "strut", r, t, {R, 100.0, 0.0});
  m.solid_dirichlet.push_back({"u1", {true, true, true}});
  m.beam_dirichlet.push_back({elements, true, true, true});
  m.surface_loads.push_back({"w0", Vec3(0, 0, 0.0002)});
  m.coupling.variant = Variant::cons;
  m.coupling.rotational = rotational;
  m.coupling.eps_r = 100.0;
  m.coupling.eps_theta = 0.1;
  m.coupling.face_sets = {"w1"};
  return m;
}

Model minimal_model() {
  Model m;
  m.name = "minimal";
  m.solid = structured_solid(SolidKind::hex8, 1, 1, 1, [](double u, double v, double w) { return Vec3(u, v, w); });
  m.material = {MaterialKind::SaintVenantKirchhoff, 1.0, 0.0};
  add_beam(m, "beam", {Vec3(0.1, 0.5, 1.05), Vec3(0.9, 0.5, 1.05)}, {Vec3(1, 0, 0), Vec3(1, 0, 0)}, {0.05, 100.0, 0.0});
  m.solid_dirichlet.push_back({"w0", {true, true, true}});
  m.point_loads.push_back({1, Vec3(0, 0, 1e-3)});
  m.coupling.face_sets = {"w1"};
  m.solve.steps = 1;
  return m;
}

std::vector<std::string> example_names() {
  std::vector<std::string> names;
  for (const char* shape : {"patch_planar_", "patch_curved_"})
    for (SolidKind k : {SolidKind::hex8, SolidKind::hex20, SolidKind::hex27, SolidKind::tet4, SolidKind::tet10})
      names.push_back(shape + to_string(k));
  names.insert(names.end(), {"halfpipe", "plate", "minimal"});
  return names;
}

Model example_model(const std::string& name) {
  for (const char* shape : {"patch_planar_", "patch_curved_"}) {
    const std::string prefix = shape;
    if (name.rfind(prefix, 0) == 0) {
      PatchOptions opt;
      opt.kind = solid_kind_from_string(name.substr(prefix.size()));
      opt.curved = prefix == "patch_curved_";
      return patch_model(opt);
    }
  }
  if (name == "halfpipe") return halfpipe_model();
  if (name == "plate") return plate_model();
  if (name == "minimal") return minimal_model();
  throw ModelError("unknown example '" + name + "'");
}

}  // namespace beamtie
