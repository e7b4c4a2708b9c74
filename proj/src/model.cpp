#include "beamtie/model.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "beamtie/error.hpp"

namespace beamtie {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::cons: return "cons";
    case Variant::ref: return "ref";
    case Variant::disp: return "disp";
  }
  return "?";
}

Variant variant_from_string(const std::string& raw) {
  std::string name = raw;
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (name == "cons") return Variant::cons;
  if (name == "ref") return Variant::ref;
  if (name == "disp") return Variant::disp;
  throw ModelError("unknown coupling variant '" + raw + "'");
}

std::string DofMap::describe(int dof) const {
  std::ostringstream os;
  if (dof < 3 * solid_nodes) {
    os << "solid node " << dof / 3 << " component " << "xyz"[dof % 3];
  } else {
    const int k = dof - 3 * solid_nodes;
    static const char* kinds[3] = {"position", "tangent", "rotation"};
    os << "beam node " << k / 9 << " " << kinds[(k % 9) / 3] << " component " << "xyz"[k % 3];
  }
  return os.str();
}

BeamNodeState beam_reference_state(const BeamMesh& mesh, int node) {
  const BeamNode& n = mesh.nodes[node];
  return {n.r0, n.t0, n.triad0};
}

State State::reference(const Model& m) {
  State s;
  s.u = Eigen::VectorXd::Zero(3 * m.solid.node_count());
  for (int k = 0; k < m.beam.node_count(); ++k) s.beam.push_back(beam_reference_state(m.beam, k));
  return s;
}

void State::update(const DofMap& dofs, const Eigen::VectorXd& delta) {
  u += delta.head(3 * dofs.solid_nodes);
  for (int k = 0; k < dofs.beam_nodes; ++k) {
    const Eigen::Matrix<double, 9, 1> d = delta.segment<9>(dofs.beam(k, 0));
    beam[k].r += d.segment<3>(0);
    beam[k].t += d.segment<3>(3);
    beam[k].triad = exp_map(RotationVector(d.segment<3>(6))) * beam[k].triad;
  }
}

std::vector<char> fixed_dofs(const Model& m) {
  const DofMap dofs(m);
  std::vector<char> fixed(dofs.size(), 0);
  for (const auto& bc : m.solid_dirichlet) {
    auto it = m.solid.node_sets.find(bc.node_set);
    if (it == m.solid.node_sets.end()) throw ModelError("unknown node set '" + bc.node_set + "'");
    for (int n : it->second)
      for (int c = 0; c < 3; ++c)
        if (bc.fixed[c]) fixed[dofs.solid(n, c)] = 1;
  }
  for (const auto& bc : m.beam_dirichlet)
    for (int c = 0; c < 3; ++c) {
      if (bc.position) fixed[dofs.beam_position(bc.node, c)] = 1;
      if (bc.tangent) fixed[dofs.beam_tangent(bc.node, c)] = 1;
      if (bc.rotation) fixed[dofs.beam_rotation(bc.node, c)] = 1;
    }
  return fixed;
}

std::vector<int> coupled_beams(const Model& m) {
  if (!m.coupling.beams.empty()) return m.coupling.beams;
  std::vector<int> all;
  for (int b = 0; b < static_cast<int>(m.beam.beams.size()); ++b) all.push_back(b);
  return all;
}

void validate(const Model& m) {
  auto fail = [](const std::string& msg) { throw ModelError(msg); };
  const int ns = m.solid.node_count(), nb = m.beam.node_count();
  if (!(m.material.E > 0.0)) fail("solid Young's modulus must be positive");
  if (!(m.material.nu > -1.0 && m.material.nu < 0.5)) fail("solid Poisson ratio outside (-1, 0.5)");
  for (size_t e = 0; e < m.solid.elements.size(); ++e) {
    const auto& el = m.solid.elements[e];
    if (static_cast<int>(el.nodes.size()) != node_count(el.kind))
      fail("solid element " + std::to_string(e) + " has a wrong node count");
    for (int n : el.nodes)
      if (n < 0 || n >= ns) fail("solid element " + std::to_string(e) + " references a missing node");
  }
  for (const auto& [name, refs] : m.solid.face_sets)
    for (const FaceRef& f : refs)
      if (f.element < 0 || f.element >= static_cast<int>(m.solid.elements.size()) || f.face < 0 ||
          f.face >= static_cast<int>(element_faces(m.solid.elements[f.element].kind).size()))
        fail("face set '" + name + "' references a missing face");
  for (const auto& [name, nodes] : m.solid.node_sets)
    for (int n : nodes)
      if (n < 0 || n >= ns) fail("node set '" + name + "' references a missing node");
  for (const auto& s : m.beam.sections)
    if (!(s.radius > 0.0) || !(s.E > 0.0)) fail("beam cross-section needs positive radius and modulus");
  for (size_t e = 0; e < m.beam.elements.size(); ++e) {
    const auto& el = m.beam.elements[e];
    for (int n : el.nodes)
      if (n < 0 || n >= nb) fail("beam element " + std::to_string(e) + " references a missing node");
    if (el.section < 0 || el.section >= static_cast<int>(m.beam.sections.size()))
      fail("beam element " + std::to_string(e) + " references a missing cross-section");
  }
  for (int k = 0; k < nb; ++k) {
    const BeamNode& n = m.beam.nodes[k];
    if (!(n.t0.norm() > 0.0)) fail("beam node " + std::to_string(k) + " has a zero tangent");
    check_rotation(n.triad0);
    if ((n.triad0.col(0) - n.t0.normalized()).norm() > 1e-8)
      fail("beam node " + std::to_string(k) + ": reference triad is not aligned with the tangent");
  }
  for (const auto& b : m.beam.beams)
    for (int e : b.elements)
      if (e < 0 || e >= static_cast<int>(m.beam.elements.size()))
        fail("beam '" + b.name + "' references a missing element");
  for (int b : coupled_beams(m))
    if (b < 0 || b >= static_cast<int>(m.beam.beams.size())) fail("coupling references a missing beam");
  for (const auto& s : m.coupling.face_sets)
    if (!m.solid.face_sets.count(s)) fail("unknown face set '" + s + "'");
  for (const auto& l : m.surface_loads)
    if (!m.solid.face_sets.count(l.face_set)) fail("unknown face set '" + l.face_set + "'");
  for (const auto& l : m.line_loads)
    if (l.beam < 0 || l.beam >= static_cast<int>(m.beam.beams.size())) fail("line load references a missing beam");
  for (const auto& l : m.point_loads)
    if (l.node < 0 || l.node >= nb) fail("point load references a missing beam node");
  for (const auto& bc : m.beam_dirichlet)
    if (bc.node < 0 || bc.node >= nb) fail("beam support references a missing beam node");
  for (const auto& bc : m.solid_dirichlet)
    if (!m.solid.node_sets.count(bc.node_set)) fail("unknown node set '" + bc.node_set + "'");
  if (!(m.coupling.eps_r >= 0.0)) fail("penalty parameter eps_r must be non-negative");
  if (!(m.coupling.eps_theta >= 0.0)) fail("penalty parameter eps_theta must be non-negative");
  if (m.coupling.gauss_points < 1) fail("gauss points per segment must be positive");
  if (m.solve.steps < 1 || m.solve.max_iterations < 1) fail("solver counts must be positive");
  if (!(m.solve.rel_tol > 0.0) || !(m.solve.abs_tol > 0.0)) fail("solver tolerances must be positive");
}

}  // namespace beamtie
