#include "beamtie/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "beamtie/error.hpp"
#include "beamtie/verification.hpp"

namespace beamtie {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// JSON value together with its path, for diagnostics.
class Cursor {
 public:
  Cursor(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ModelError(path_ + ": " + msg); }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  void expect_object(const std::set<std::string>& allowed) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [k, v] : j_->items())
      if (!allowed.count(k)) fail("unknown key '" + k + "'");
  }
  Cursor operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) fail("missing required key '" + key + "'");
    return Cursor(j_->at(key), path_ + "." + key);
  }
  std::optional<Cursor> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return Cursor(j_->at(key), path_ + "." + key);
  }
  size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  Cursor at(size_t i) const {
    size();
    return Cursor(j_->at(i), path_ + "[" + std::to_string(i) + "]");
  }
  std::vector<std::pair<std::string, Cursor>> members() const {
    if (!j_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Cursor>> out;
    for (const auto& [k, v] : j_->items()) out.emplace_back(k, Cursor(v, path_ + "." + k));
    return out;
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  int integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<int>();
  }
  int index(int count, const std::string& what) const {
    const int v = integer();
    if (v < 0 || v >= count) fail(what + " " + std::to_string(v) + " does not exist");
    return v;
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  Vec3 vec3() const {
    if (!j_->is_array() || j_->size() != 3) fail("expected an array of 3 numbers");
    return Vec3(at(0).number(), at(1).number(), at(2).number());
  }

 private:
  const json* j_;
  std::string path_;
};

template <class T, class F>
T get_or(const std::optional<Cursor>& c, T fallback, F&& read) {
  return c ? read(*c) : fallback;
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

SolidMesh read_solid(const Cursor& c, Material& material) {
  c.expect_object({"nodes", "elements", "face_sets", "node_sets", "material"});
  SolidMesh mesh;
  const Cursor nodes = c["nodes"];
  for (size_t i = 0; i < nodes.size(); ++i) mesh.X.push_back(nodes.at(i).vec3());
  const int nn = mesh.node_count();
  const Cursor elements = c["elements"];
  for (size_t e = 0; e < elements.size(); ++e) {
    const Cursor el = elements.at(e);
    el.expect_object({"type", "nodes"});
    SolidKind kind;
    try {
      kind = solid_kind_from_string(el["type"].string());
    } catch (const ModelError&) {
      el["type"].fail("unknown element type '" + el["type"].string() + "'");
    }
    const Cursor ids = el["nodes"];
    if (static_cast<int>(ids.size()) != node_count(kind))
      ids.fail(to_string(kind) + " needs " + std::to_string(node_count(kind)) + " nodes");
    SolidElement se{kind, {}};
    for (size_t a = 0; a < ids.size(); ++a) se.nodes.push_back(ids.at(a).index(nn, "node"));
    mesh.elements.push_back(se);
  }
  const int ne = static_cast<int>(mesh.elements.size());
  if (auto fs = c.opt("face_sets"))
    for (const auto& [name, list] : fs->members())
      for (size_t i = 0; i < list.size(); ++i) {
        const Cursor pair = list.at(i);
        if (pair.size() != 2) pair.fail("expected [element, face]");
        const int e = pair.at(0).index(ne, "element");
        const int faces = static_cast<int>(element_faces(mesh.elements[e].kind).size());
        mesh.face_sets[name].push_back({e, pair.at(1).index(faces, "face")});
      }
  if (auto ns = c.opt("node_sets"))
    for (const auto& [name, list] : ns->members())
      for (size_t i = 0; i < list.size(); ++i) mesh.node_sets[name].push_back(list.at(i).index(nn, "node"));
  const Cursor mat = c["material"];
  mat.expect_object({"model", "E", "nu"});
  try {
    material.kind = material_kind_from_string(mat["model"].string());
  } catch (const ModelError&) {
    mat["model"].fail("unknown material model '" + mat["model"].string() + "'");
  }
  material.E = mat["E"].number();
  material.nu = get_or(mat.opt("nu"), 0.0, [](const Cursor& x) { return x.number(); });
  return mesh;
}

BeamMesh read_beam(const Cursor& c) {
  c.expect_object({"sections", "nodes", "elements", "beams"});
  BeamMesh mesh;
  const Cursor sections = c["sections"];
  for (size_t i = 0; i < sections.size(); ++i) {
    const Cursor s = sections.at(i);
    s.expect_object({"radius", "E", "nu"});
    mesh.sections.push_back({s["radius"].number(), s["E"].number(),
                             get_or(s.opt("nu"), 0.0, [](const Cursor& x) { return x.number(); })});
  }
  const Cursor nodes = c["nodes"];
  for (size_t i = 0; i < nodes.size(); ++i) {
    const Cursor n = nodes.at(i);
    n.expect_object({"position", "tangent", "rotation", "triad"});
    const Vec3 t = n["tangent"].vec3();
    if (!(t.norm() > 0.0)) n["tangent"].fail("tangent must be nonzero");
    Triad triad = smallest_rotation_from_e1(t.normalized());
    if (auto rot = n.opt("rotation")) triad = exp_map(RotationVector(rot->vec3()));
    if (auto tr = n.opt("triad")) {
      if (n.has("rotation")) tr->fail("give either rotation or triad");
      if (tr->size() != 3) tr->fail("expected 3 rows");
      for (int r = 0; r < 3; ++r) triad.row(r) = tr->at(r).vec3().transpose();
      if ((triad.transpose() * triad - Mat3::Identity()).norm() > 1e-10 || triad.determinant() < 0.0)
        tr->fail("triad is not a rotation");
    }
    mesh.nodes.push_back({n["position"].vec3(), t, triad});
  }
  const int nn = mesh.node_count(), nsec = static_cast<int>(mesh.sections.size());
  const Cursor elements = c["elements"];
  for (size_t e = 0; e < elements.size(); ++e) {
    const Cursor el = elements.at(e);
    el.expect_object({"nodes", "section"});
    const Cursor ids = el["nodes"];
    if (ids.size() != 2) ids.fail("beam elements have 2 nodes");
    BeamElement be;
    be.nodes = {ids.at(0).index(nn, "beam node"), ids.at(1).index(nn, "beam node")};
    if (be.nodes[0] == be.nodes[1]) ids.fail("element nodes must differ");
    be.section = get_or(el.opt("section"), 0, [&](const Cursor& x) { return x.index(nsec, "section"); });
    if (be.section >= nsec) el.fail("no cross-section defined");
    mesh.elements.push_back(be);
  }
  const int ne = static_cast<int>(mesh.elements.size());
  if (auto beams = c.opt("beams")) {
    for (size_t b = 0; b < beams->size(); ++b) {
      const Cursor bc = beams->at(b);
      bc.expect_object({"name", "elements"});
      Beam beam{get_or(bc.opt("name"), "beam" + std::to_string(b), [](const Cursor& x) { return x.string(); }), {}};
      const Cursor list = bc["elements"];
      for (size_t i = 0; i < list.size(); ++i) beam.elements.push_back(list.at(i).index(ne, "beam element"));
      mesh.beams.push_back(beam);
    }
  } else if (ne > 0) {
    Beam all{"beam", {}};
    for (int e = 0; e < ne; ++e) all.elements.push_back(e);
    mesh.beams.push_back(all);
  }
  try {
    finalize_beam_mesh(mesh);
  } catch (const Error& err) {
    c.fail(err.what());
  }
  return mesh;
}

}  // namespace

Model model_from_json(const json& j) {
  const Cursor root(j, "$");
  root.expect_object({"name", "units", "solid", "beam", "supports", "loads", "coupling", "solve"});
  Model m;
  m.name = get_or(root.opt("name"), std::string("model"), [](const Cursor& c) { return c.string(); });
  if (auto u = root.opt("units"))
    if (u->string() != "SI") u->fail("only SI units are supported");
  m.solid = read_solid(root["solid"], m.material);
  if (auto b = root.opt("beam")) m.beam = read_beam(*b);
  const int nb = m.beam.node_count(), nbeams = static_cast<int>(m.beam.beams.size());

  auto face_set = [&](const Cursor& c) {
    const std::string name = c.string();
    if (!m.solid.face_sets.count(name)) c.fail("unknown face set '" + name + "'");
    return name;
  };
  if (auto sup = root.opt("supports")) {
    sup->expect_object({"solid", "beam"});
    if (auto s = sup->opt("solid"))
      for (size_t i = 0; i < s->size(); ++i) {
        const Cursor c = s->at(i);
        c.expect_object({"node_set", "fixed"});
        SolidDirichlet bc;
        bc.node_set = c["node_set"].string();
        if (!m.solid.node_sets.count(bc.node_set)) c["node_set"].fail("unknown node set '" + bc.node_set + "'");
        if (auto f = c.opt("fixed")) {
          if (f->size() != 3) f->fail("expected 3 booleans");
          for (int k = 0; k < 3; ++k) bc.fixed[k] = f->at(k).boolean();
        }
        m.solid_dirichlet.push_back(bc);
      }
    if (auto s = sup->opt("beam"))
      for (size_t i = 0; i < s->size(); ++i) {
        const Cursor c = s->at(i);
        c.expect_object({"node", "position", "tangent", "rotation"});
        BeamDirichlet bc;
        bc.node = c["node"].index(nb, "beam node");
        auto flag = [](const std::optional<Cursor>& x) { return x ? x->boolean() : true; };
        bc.position = flag(c.opt("position"));
        bc.tangent = flag(c.opt("tangent"));
        bc.rotation = flag(c.opt("rotation"));
        m.beam_dirichlet.push_back(bc);
      }
  }
  if (auto loads = root.opt("loads")) {
    loads->expect_object({"surface", "line", "point"});
    if (auto s = loads->opt("surface"))
      for (size_t i = 0; i < s->size(); ++i) {
        const Cursor c = s->at(i);
        c.expect_object({"face_set", "traction"});
        m.surface_loads.push_back({face_set(c["face_set"]), c["traction"].vec3()});
      }
    if (auto s = loads->opt("line"))
      for (size_t i = 0; i < s->size(); ++i) {
        const Cursor c = s->at(i);
        c.expect_object({"beam", "load"});
        m.line_loads.push_back({c["beam"].index(nbeams, "beam"), c["load"].vec3()});
      }
    if (auto s = loads->opt("point"))
      for (size_t i = 0; i < s->size(); ++i) {
        const Cursor c = s->at(i);
        c.expect_object({"node", "force"});
        m.point_loads.push_back({c["node"].index(nb, "beam node"), c["force"].vec3()});
      }
  }
  if (auto c = root.opt("coupling")) {
    c->expect_object({"variant", "rotational", "eps_r", "eps_theta", "gauss_points", "face_sets", "beams"});
    CouplingConfig& cc = m.coupling;
    if (auto v = c->opt("variant")) {
      try {
        cc.variant = variant_from_string(v->string());
      } catch (const ModelError&) {
        v->fail("unknown coupling variant '" + v->string() + "' (cons, ref or disp)");
      }
    }
    if (auto v = c->opt("rotational")) cc.rotational = v->boolean();
    if (auto v = c->opt("eps_r")) cc.eps_r = v->number();
    if (auto v = c->opt("eps_theta")) cc.eps_theta = v->number();
    if (auto v = c->opt("gauss_points")) cc.gauss_points = v->integer();
    if (auto v = c->opt("face_sets"))
      for (size_t i = 0; i < v->size(); ++i) cc.face_sets.push_back(face_set(v->at(i)));
    if (auto v = c->opt("beams"))
      for (size_t i = 0; i < v->size(); ++i) cc.beams.push_back(v->at(i).index(nbeams, "beam"));
  }
  if (auto c = root.opt("solve")) {
    c->expect_object({"steps", "rel_tol", "abs_tol", "max_iterations"});
    if (auto v = c->opt("steps")) m.solve.steps = v->integer();
    if (auto v = c->opt("rel_tol")) m.solve.rel_tol = v->number();
    if (auto v = c->opt("abs_tol")) m.solve.abs_tol = v->number();
    if (auto v = c->opt("max_iterations")) m.solve.max_iterations = v->integer();
  }
  try {
    validate(m);
  } catch (const ModelError& e) {
    throw ModelError(std::string("$: ") + e.what());
  }
  return m;
}

namespace {

ordered_json model_document(const Model& m) {
  ordered_json j;
  j["name"] = m.name;
  j["units"] = "SI";
  ordered_json solid;
  solid["nodes"] = ordered_json::array();
  for (const Vec3& x : m.solid.X) solid["nodes"].push_back(vec_json(x));
  solid["elements"] = ordered_json::array();
  for (const SolidElement& e : m.solid.elements) solid["elements"].push_back({{"type", to_string(e.kind)}, {"nodes", e.nodes}});
  solid["face_sets"] = ordered_json::object();
  for (const auto& [name, faces] : m.solid.face_sets) {
    ordered_json list = ordered_json::array();
    for (const FaceRef& f : faces) list.push_back({f.element, f.face});
    solid["face_sets"][name] = list;
  }
  solid["node_sets"] = ordered_json::object();
  for (const auto& [name, nodes] : m.solid.node_sets) solid["node_sets"][name] = nodes;
  solid["material"] = {{"model", to_string(m.material.kind)}, {"E", m.material.E}, {"nu", m.material.nu}};
  j["solid"] = solid;

  ordered_json beam;
  beam["sections"] = ordered_json::array();
  for (const CrossSection& s : m.beam.sections) beam["sections"].push_back({{"radius", s.radius}, {"E", s.E}, {"nu", s.nu}});
  beam["nodes"] = ordered_json::array();
  for (const BeamNode& n : m.beam.nodes)
    beam["nodes"].push_back({{"position", vec_json(n.r0)}, {"tangent", vec_json(n.t0)}, {"triad", {vec_json(n.triad0.row(0)), vec_json(n.triad0.row(1)), vec_json(n.triad0.row(2))}}});
  beam["elements"] = ordered_json::array();
  for (const BeamElement& e : m.beam.elements) beam["elements"].push_back({{"nodes", e.nodes}, {"section", e.section}});
  beam["beams"] = ordered_json::array();
  for (const Beam& b : m.beam.beams) beam["beams"].push_back({{"name", b.name}, {"elements", b.elements}});
  j["beam"] = beam;

  ordered_json sup;
  sup["solid"] = ordered_json::array();
  for (const SolidDirichlet& bc : m.solid_dirichlet)
    sup["solid"].push_back({{"node_set", bc.node_set}, {"fixed", {bc.fixed[0], bc.fixed[1], bc.fixed[2]}}});
  sup["beam"] = ordered_json::array();
  for (const BeamDirichlet& bc : m.beam_dirichlet)
    sup["beam"].push_back({{"node", bc.node}, {"position", bc.position}, {"tangent", bc.tangent}, {"rotation", bc.rotation}});
  j["supports"] = sup;

  ordered_json loads;
  loads["surface"] = ordered_json::array();
  for (const SurfaceLoad& l : m.surface_loads) loads["surface"].push_back({{"face_set", l.face_set}, {"traction", vec_json(l.traction)}});
  loads["line"] = ordered_json::array();
  for (const LineLoad& l : m.line_loads) loads["line"].push_back({{"beam", l.beam}, {"load", vec_json(l.load)}});
  loads["point"] = ordered_json::array();
  for (const PointLoad& l : m.point_loads) loads["point"].push_back({{"node", l.node}, {"force", vec_json(l.force)}});
  j["loads"] = loads;

  const CouplingConfig& c = m.coupling;
  j["coupling"] = {{"variant", to_string(c.variant)}, {"rotational", c.rotational},     {"eps_r", c.eps_r},
                   {"eps_theta", c.eps_theta},        {"gauss_points", c.gauss_points}, {"face_sets", c.face_sets},
                   {"beams", c.beams}};
  j["solve"] = {{"steps", m.solve.steps},
                {"rel_tol", m.solve.rel_tol},
                {"abs_tol", m.solve.abs_tol},
                {"max_iterations", m.solve.max_iterations}};
  return j;
}

}  // namespace

json model_to_json(const Model& m) { return json::parse(model_document(m).dump()); }

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError(path + ": JSON parse error: " + e.what());
  }
  return model_from_json(j);
}

void save_model(const Model& m, const std::string& path) {
  write_file(path, model_document(m).dump(1) + "\n");
}

bool models_equivalent(const Model& a, const Model& b, double tol, std::string* why) {
  auto no = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  auto close = [&](const Vec3& x, const Vec3& y) { return (x - y).norm() <= tol; };
  if (a.name != b.name) return no("name");
  if (a.solid.X.size() != b.solid.X.size()) return no("solid node count");
  for (size_t i = 0; i < a.solid.X.size(); ++i)
    if (!close(a.solid.X[i], b.solid.X[i])) return no("solid node " + std::to_string(i));
  if (a.solid.elements.size() != b.solid.elements.size()) return no("solid element count");
  for (size_t e = 0; e < a.solid.elements.size(); ++e)
    if (a.solid.elements[e].kind != b.solid.elements[e].kind || a.solid.elements[e].nodes != b.solid.elements[e].nodes)
      return no("solid element " + std::to_string(e));
  if (a.solid.face_sets != b.solid.face_sets) return no("face sets");
  if (a.solid.node_sets != b.solid.node_sets) return no("node sets");
  if (a.material.kind != b.material.kind || a.material.E != b.material.E || a.material.nu != b.material.nu)
    return no("material");
  if (a.beam.nodes.size() != b.beam.nodes.size()) return no("beam node count");
  for (size_t i = 0; i < a.beam.nodes.size(); ++i) {
    const BeamNode &x = a.beam.nodes[i], &y = b.beam.nodes[i];
    if (!close(x.r0, y.r0) || !close(x.t0, y.t0) || (x.triad0 - y.triad0).norm() > tol)
      return no("beam node " + std::to_string(i));
  }
  if (a.beam.elements.size() != b.beam.elements.size()) return no("beam element count");
  for (size_t e = 0; e < a.beam.elements.size(); ++e)
    if (a.beam.elements[e].nodes != b.beam.elements[e].nodes || a.beam.elements[e].section != b.beam.elements[e].section ||
        std::abs(a.beam.elements[e].length - b.beam.elements[e].length) > tol)
      return no("beam element " + std::to_string(e));
  if (a.beam.sections.size() != b.beam.sections.size()) return no("section count");
  for (size_t s = 0; s < a.beam.sections.size(); ++s)
    if (a.beam.sections[s].radius != b.beam.sections[s].radius || a.beam.sections[s].E != b.beam.sections[s].E ||
        a.beam.sections[s].nu != b.beam.sections[s].nu)
      return no("section " + std::to_string(s));
  if (a.beam.beams.size() != b.beam.beams.size()) return no("beam count");
  for (size_t k = 0; k < a.beam.beams.size(); ++k)
    if (a.beam.beams[k].name != b.beam.beams[k].name || a.beam.beams[k].elements != b.beam.beams[k].elements)
      return no("beam " + std::to_string(k));
  if (a.solid_dirichlet.size() != b.solid_dirichlet.size()) return no("solid supports");
  for (size_t i = 0; i < a.solid_dirichlet.size(); ++i)
    if (a.solid_dirichlet[i].node_set != b.solid_dirichlet[i].node_set || a.solid_dirichlet[i].fixed != b.solid_dirichlet[i].fixed)
      return no("solid support " + std::to_string(i));
  if (a.beam_dirichlet.size() != b.beam_dirichlet.size()) return no("beam supports");
  for (size_t i = 0; i < a.beam_dirichlet.size(); ++i) {
    const BeamDirichlet &x = a.beam_dirichlet[i], &y = b.beam_dirichlet[i];
    if (x.node != y.node || x.position != y.position || x.tangent != y.tangent || x.rotation != y.rotation)
      return no("beam support " + std::to_string(i));
  }
  if (a.surface_loads.size() != b.surface_loads.size()) return no("surface loads");
  for (size_t i = 0; i < a.surface_loads.size(); ++i)
    if (a.surface_loads[i].face_set != b.surface_loads[i].face_set || a.surface_loads[i].traction != b.surface_loads[i].traction)
      return no("surface load " + std::to_string(i));
  if (a.line_loads.size() != b.line_loads.size()) return no("line loads");
  for (size_t i = 0; i < a.line_loads.size(); ++i)
    if (a.line_loads[i].beam != b.line_loads[i].beam || a.line_loads[i].load != b.line_loads[i].load)
      return no("line load " + std::to_string(i));
  if (a.point_loads.size() != b.point_loads.size()) return no("point loads");
  for (size_t i = 0; i < a.point_loads.size(); ++i)
    if (a.point_loads[i].node != b.point_loads[i].node || a.point_loads[i].force != b.point_loads[i].force)
      return no("point load " + std::to_string(i));
  const CouplingConfig &x = a.coupling, &y = b.coupling;
  if (x.variant != y.variant || x.rotational != y.rotational || x.eps_r != y.eps_r || x.eps_theta != y.eps_theta ||
      x.gauss_points != y.gauss_points || x.face_sets != y.face_sets || x.beams != y.beams)
    return no("coupling");
  if (a.solve.steps != b.solve.steps || a.solve.rel_tol != b.solve.rel_tol || a.solve.abs_tol != b.solve.abs_tol ||
      a.solve.max_iterations != b.solve.max_iterations)
    return no("solve");
  return true;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

int vtk_cell_type(SolidKind kind) {
  switch (kind) {
    case SolidKind::hex8: return 12;
    case SolidKind::hex20: return 25;
    case SolidKind::hex27: return 29;
    case SolidKind::tet4: return 10;
    case SolidKind::tet10: return 24;
  }
  return 0;
}

void data_array(std::ostringstream& os, const std::string& type, const std::string& name, int components,
                const std::vector<double>& values) {
  os << "        <DataArray type=\"" << type << "\" Name=\"" << name << "\"";
  if (components > 1) os << " NumberOfComponents=\"" << components << "\"";
  os << " format=\"ascii\">\n";
  for (size_t i = 0; i < values.size(); i += components) {
    os << "          ";
    for (int c = 0; c < components; ++c) os << (c ? " " : "") << format_number(values[i + c]);
    os << '\n';
  }
  os << "        </DataArray>\n";
}

template <class T>
void int_array(std::ostringstream& os, const std::string& type, const std::string& name, const std::vector<T>& values) {
  os << "        <DataArray type=\"" << type << "\" Name=\"" << name << "\" format=\"ascii\">\n          ";
  for (size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << +values[i];
  os << "\n        </DataArray>\n";
}

void push(std::vector<double>& v, const Vec3& x) { v.insert(v.end(), {x.x(), x.y(), x.z()}); }

}  // namespace

void write_solid_vtu(const std::string& path, const Model& m, const State& s) {
  const SolidMesh& mesh = m.solid;
  std::vector<double> points, disp, s33;
  for (int k = 0; k < mesh.node_count(); ++k) {
    push(points, mesh.X[k]);
    push(disp, s.u.segment<3>(3 * k));
  }
  for (const Mat3& S : nodal_stresses(mesh, m.material, s.u)) s33.push_back(S(2, 2));
  std::vector<long long> conn, offsets;
  std::vector<int> types;
  for (const SolidElement& e : mesh.elements) {
    conn.insert(conn.end(), e.nodes.begin(), e.nodes.end());
    offsets.push_back(static_cast<long long>(conn.size()));
    types.push_back(vtk_cell_type(e.kind));
  }
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n"
     << "<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n"
     << "  <UnstructuredGrid>\n"
     << "    <Piece NumberOfPoints=\"" << mesh.node_count() << "\" NumberOfCells=\"" << mesh.elements.size() << "\">\n"
     << "      <PointData Vectors=\"displacement\" Scalars=\"S33\">\n";
  data_array(os, "Float64", "displacement", 3, disp);
  data_array(os, "Float64", "S33", 1, s33);
  os << "      </PointData>\n      <Points>\n";
  data_array(os, "Float64", "Points", 3, points);
  os << "      </Points>\n      <Cells>\n";
  int_array(os, "Int64", "connectivity", conn);
  int_array(os, "Int64", "offsets", offsets);
  int_array(os, "UInt8", "types", types);
  os << "      </Cells>\n    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n";
  write_file(path, os.str());
}

void write_beam_vtp(const std::string& path, const Problem& p, const State& s,
                    const std::optional<MortarData>& mortar, int samples) {
  const Model& m = *p.model;
  const BeamMesh& bm = m.beam;
  Eigen::VectorXd lambda;
  if (mortar) lambda = positional_multipliers(m, *mortar);
  std::vector<double> points, disp, curv, lam, mid;
  std::vector<long long> conn, offsets;
  auto bending = [](const Vec3& omega) { return std::hypot(omega[1], omega[2]); };
  for (int e = 0; e < static_cast<int>(bm.elements.size()); ++e) {
    const BeamElement& el = bm.elements[e];
    const BeamElementGeometry& g = p.beam_geometry[e];
    const BeamNodeState &a = s.beam[el.nodes[0]], &b = s.beam[el.nodes[1]];
    for (int k = 0; k < samples; ++k) {
      const double xi = samples > 1 ? -1.0 + 2.0 * k / (samples - 1) : 0.0;
      const Vec3 x0 = hermite_eval(el.length, xi, g.reference[0], g.reference[1]).first;
      const Vec3 x = hermite_eval(el.length, xi, a, b).first;
      conn.push_back(static_cast<long long>(points.size() / 3));
      push(points, x0);
      push(disp, x - x0);
      curv.push_back(bending(beam_strains(g, a, b, xi).Omega));
      Vec3 l = Vec3::Zero();
      if (mortar)
        l = 0.5 * (1.0 - xi) * lambda.segment<3>(3 * el.nodes[0]) + 0.5 * (1.0 + xi) * lambda.segment<3>(3 * el.nodes[1]);
      push(lam, l);
    }
    offsets.push_back(static_cast<long long>(conn.size()));
    mid.push_back(bending(beam_strains(g, a, b, 0.0).Omega));
  }
  const size_t npts = points.size() / 3;
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n"
     << "<VTKFile type=\"PolyData\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n"
     << "  <PolyData>\n"
     << "    <Piece NumberOfPoints=\"" << npts << "\" NumberOfVerts=\"0\" NumberOfLines=\"" << bm.elements.size()
     << "\" NumberOfStrips=\"0\" NumberOfPolys=\"0\">\n"
     << "      <PointData Vectors=\"displacement\" Scalars=\"curvature\">\n";
  data_array(os, "Float64", "displacement", 3, disp);
  data_array(os, "Float64", "curvature", 1, curv);
  data_array(os, "Float64", "lambda", 3, lam);
  os << "      </PointData>\n      <CellData Scalars=\"curvature_mid\">\n";
  data_array(os, "Float64", "curvature_mid", 1, mid);
  os << "      </CellData>\n      <Points>\n";
  data_array(os, "Float64", "Points", 3, points);
  os << "      </Points>\n      <Lines>\n";
  int_array(os, "Int64", "connectivity", conn);
  int_array(os, "Int64", "offsets", offsets);
  os << "      </Lines>\n    </Piece>\n  </PolyData>\n</VTKFile>\n";
  write_file(path, os.str());
}

RunSummary summarize(const Problem& p, const SolveResult& r) {
  const Model& m = *p.model;
  RunSummary s;
  s.model = m.name;
  s.variant = to_string(m.coupling.variant);
  s.rotational = m.coupling.rotational;
  s.eps_r = m.coupling.eps_r;
  s.eps_theta = m.coupling.eps_theta;
  s.steps = m.solve.steps;
  s.load_factor = r.load_factor;
  s.energy = r.final_system.energy;
  s.max_solid_displacement = max_solid_displacement(r.state);
  s.max_s33 = m.solid.elements.empty() ? 0.0 : max_abs_s33(m, r.state);
  for (const Beam& b : m.beam.beams) {
    const int node = m.beam.elements[b.elements.back()].nodes[1];
    s.beam_tip_displacement.push_back(r.state.beam[node].r - m.beam.nodes[node].r0);
  }
  for (int c = 0; c < 3; ++c) s.mean_beam_displacement[c] = mean_beam_displacement(m, r.state, c);
  s.coupled = r.final_system.mortar.has_value();
  if (s.coupled) {
    const MortarData& md = *r.final_system.mortar;
    s.constraint_inf = md.r.size() ? md.r.cwiseAbs().maxCoeff() : 0.0;
    s.rotational_constraint_inf = md.r_theta.size() ? md.r_theta.cwiseAbs().maxCoeff() : 0.0;
    s.audit = conservation_audit(m, *p.mortar, md, r.state, r.final_system.coupling_gradient);
  }
  s.history = r.history;
  return s;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string sci3(const Vec3& v) { return "(" + sci(v.x()) + ", " + sci(v.y()) + ", " + sci(v.z()) + ")"; }

ordered_json num3(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::string text_report(const RunSummary& s) {
  std::ostringstream os;
  os << "model                      " << s.model << '\n'
     << "variant                    " << s.variant << (s.rotational ? " + rotational" : " (positional only)") << '\n'
     << "eps_r / eps_theta          " << sci(s.eps_r) << " / " << sci(s.eps_theta) << '\n'
     << "load steps / final factor  " << s.steps << " / " << sci(s.load_factor) << '\n'
     << "energy solid               " << sci(s.energy.solid) << '\n'
     << "energy beam                " << sci(s.energy.beam) << '\n'
     << "energy penalty positional  " << sci(s.energy.penalty_positional) << '\n'
     << "energy penalty rotational  " << sci(s.energy.penalty_rotational) << '\n'
     << "internal energy (total)    " << sci(s.energy.internal()) << '\n'
     << "external work              " << sci(s.energy.external_work) << '\n'
     << "max solid |u|              " << sci(s.max_solid_displacement) << '\n'
     << "max solid |S33|            " << sci(s.max_s33) << '\n'
     << "mean beam displacement     " << sci3(s.mean_beam_displacement) << '\n';
  for (size_t b = 0; b < s.beam_tip_displacement.size(); ++b)
    os << "beam " << b << " tip displacement    " << sci3(s.beam_tip_displacement[b]) << '\n';
  if (s.coupled) {
    const double scale = s.audit.lambda_norm * s.audit.coupled_length;
    os << "constraint |r|_inf         " << sci(s.constraint_inf) << '\n'
       << "rotational |r_theta|_inf   " << sci(s.rotational_constraint_inf) << '\n'
       << "coupled length             " << sci(s.audit.coupled_length) << '\n'
       << "max |lambda|               " << sci(s.audit.lambda_norm) << '\n'
       << "net coupling force         " << sci3(s.audit.force) << '\n'
       << "net coupling moment        " << sci3(s.audit.moment) << '\n'
       << "force / (|lambda| L)       " << sci(scale > 0 ? s.audit.force.norm() / scale : 0.0) << '\n'
       << "moment / (|lambda| L)      " << sci(scale > 0 ? s.audit.moment.norm() / scale : 0.0) << '\n';
  }
  os << "newton history (step:iteration residual)\n";
  for (const IterationRecord& h : s.history) os << "  " << h.step << ':' << h.iteration << ' ' << sci(h.residual_norm) << '\n';
  return os.str();
}

ordered_json json_report(const RunSummary& s) {
  ordered_json j;
  j["model"] = s.model;
  j["variant"] = s.variant;
  j["rotational"] = s.rotational;
  j["eps_r"] = s.eps_r;
  j["eps_theta"] = s.eps_theta;
  j["steps"] = s.steps;
  j["load_factor"] = s.load_factor;
  j["energy"] = {{"solid", s.energy.solid},
                 {"beam", s.energy.beam},
                 {"penalty_positional", s.energy.penalty_positional},
                 {"penalty_rotational", s.energy.penalty_rotational},
                 {"internal", s.energy.internal()},
                 {"external_work", s.energy.external_work}};
  j["max_solid_displacement"] = s.max_solid_displacement;
  j["max_s33"] = s.max_s33;
  j["mean_beam_displacement"] = num3(s.mean_beam_displacement);
  j["beam_tip_displacement"] = ordered_json::array();
  for (const Vec3& v : s.beam_tip_displacement) j["beam_tip_displacement"].push_back(num3(v));
  if (s.coupled) {
    j["constraint_inf"] = s.constraint_inf;
    j["rotational_constraint_inf"] = s.rotational_constraint_inf;
    j["audit"] = {{"force", num3(s.audit.force)},
                  {"moment", num3(s.audit.moment)},
                  {"lambda_max", s.audit.lambda_norm},
                  {"coupled_length", s.audit.coupled_length}};
  }
  j["history"] = ordered_json::array();
  for (const IterationRecord& h : s.history)
    j["history"].push_back({{"step", h.step}, {"iteration", h.iteration}, {"residual", h.residual_norm}});
  return j;
}

}  // namespace beamtie
