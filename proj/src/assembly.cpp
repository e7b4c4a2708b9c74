#include "beamtie/assembly.hpp"

#include "beamtie/error.hpp"
#include "beamtie/parallel.hpp"

namespace beamtie {

namespace {

// Global indices of a beam element's 18 local unknowns.
std::array<int, 18> beam_element_dofs(const DofMap& dofs, const BeamElement& el) {
  std::array<int, 18> idx;
  for (int a = 0; a < 2; ++a)
    for (int k = 0; k < 9; ++k) idx[9 * a + k] = dofs.beam(el.nodes[a], k);
  return idx;
}

}  // namespace

Problem::Problem(const Model& m) : model(&m), dofs(m) {
  validate(m);
  fixed = fixed_dofs(m);
  for (int e = 0; e < static_cast<int>(m.beam.elements.size()); ++e)
    beam_geometry.push_back(beamtie::beam_geometry(m.beam, e));
  external = external_forces(m, beam_geometry);
  if (!m.coupling.face_sets.empty() && !coupled_beams(m).empty()) mortar = build_mortar(m);
}

Eigen::VectorXd external_forces(const Model& m, const std::vector<BeamElementGeometry>& geometry) {
  const DofMap dofs(m);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs.size());
  for (const SurfaceLoad& load : m.surface_loads)
    for (const FaceRef& fr : m.solid.face_sets.at(load.face_set)) {
      const SolidElement& el = m.solid.elements[fr.element];
      const LocalFace& lf = element_faces(el.kind)[fr.face];
      Eigen::MatrixXd Xf(lf.nodes.size(), 3);
      for (size_t a = 0; a < lf.nodes.size(); ++a) Xf.row(a) = m.solid.X[el.nodes[lf.nodes[a]]].transpose();
      const Eigen::VectorXd fe = facet_traction_forces(lf.kind, Xf, load.traction);
      for (size_t a = 0; a < lf.nodes.size(); ++a)
        f.segment<3>(dofs.solid(el.nodes[lf.nodes[a]], 0)) += fe.segment<3>(3 * a);
    }
  for (const LineLoad& load : m.line_loads)
    for (int e : m.beam.beams[load.beam].elements) {
      const BeamElement& el = m.beam.elements[e];
      const auto fe = beam_line_load(geometry[e], load.load);
      for (int a = 0; a < 2; ++a) {
        f.segment<3>(dofs.beam_position(el.nodes[a], 0)) += fe.segment<3>(6 * a);
        f.segment<3>(dofs.beam_tangent(el.nodes[a], 0)) += fe.segment<3>(6 * a + 3);
      }
    }
  for (const PointLoad& load : m.point_loads) f.segment<3>(dofs.beam_position(load.node, 0)) += load.force;
  return f;
}

Eigen::VectorXd displacement_vector(const Problem& p, const State& s) {
  const Model& m = *p.model;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(p.dofs.size());
  d.head(3 * p.dofs.solid_nodes) = s.u;
  for (int k = 0; k < p.dofs.beam_nodes; ++k) {
    d.segment<3>(p.dofs.beam_position(k, 0)) = s.beam[k].r - m.beam.nodes[k].r0;
    d.segment<3>(p.dofs.beam_tangent(k, 0)) = s.beam[k].t - m.beam.nodes[k].t0;
  }
  return d;
}

double free_norm(const Problem& p, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i)
    if (!p.fixed[i]) s += v[i] * v[i];
  return std::sqrt(s);
}

AssembledSystem assemble(const Problem& p, const State& s, double load_factor, bool with_tangent) {
  const Model& m = *p.model;
  const DofMap& dofs = p.dofs;
  const int n = dofs.size();
  AssembledSystem out;
  out.residual = Eigen::VectorXd::Zero(n);
  out.coupling_gradient = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;

  const int ne = static_cast<int>(m.solid.elements.size());
  std::vector<ElementResult> solid(ne);
  parallel_for(ne, [&](int e) {
    const Eigen::MatrixXd Xe = element_coordinates(m.solid, e);
    const Eigen::MatrixXd ue = element_coordinates(m.solid, e, s.u);
    solid[e] = internal_force_tangent(m.solid.elements[e].kind, m.material, Xe, ue, with_tangent);
  });
  for (int e = 0; e < ne; ++e) {
    const auto& nodes = m.solid.elements[e].nodes;
    out.energy.solid += solid[e].energy;
    std::vector<int> idx;
    for (int k : nodes)
      for (int c = 0; c < 3; ++c) idx.push_back(dofs.solid(k, c));
    for (size_t i = 0; i < idx.size(); ++i) {
      out.residual[idx[i]] += solid[e].residual[i];
      if (with_tangent)
        for (size_t j = 0; j < idx.size(); ++j) trip.emplace_back(idx[i], idx[j], solid[e].stiffness(i, j));
    }
  }

  const int nb = static_cast<int>(m.beam.elements.size());
  std::vector<BeamElementResult> beam(nb);
  parallel_for(nb, [&](int e) {
    const BeamElement& el = m.beam.elements[e];
    beam[e] = beam_internal_force_tangent(p.beam_geometry[e], m.beam.sections[el.section],
                                          s.beam[el.nodes[0]], s.beam[el.nodes[1]]);
  });
  for (int e = 0; e < nb; ++e) {
    out.energy.beam += beam[e].energy;
    const auto idx = beam_element_dofs(dofs, m.beam.elements[e]);
    for (int i = 0; i < 18; ++i) {
      out.residual[idx[i]] += beam[e].residual[i];
      if (with_tangent)
        for (int j = 0; j < 18; ++j) trip.emplace_back(idx[i], idx[j], beam[e].tangent(i, j));
    }
  }

  if (p.coupled()) {
    MortarData md = evaluate_mortar(m, *p.mortar, s);
    PenaltyContribution pc = penalty_condense(m, *p.mortar, md, s, with_tangent);
    out.energy.penalty_positional = pc.energy_positional;
    out.energy.penalty_rotational = pc.energy_rotational;
    out.coupling_gradient = pc.gradient;
    out.residual += pc.gradient;
    if (with_tangent) {
      trip.insert(trip.end(), pc.tangent.begin(), pc.tangent.end());
      // multiplicative rotation correction for the coupling moments
      for (int k = 0; k < dofs.beam_nodes; ++k) {
        const int r = dofs.beam_rotation(k, 0);
        const Mat3 S = skew(Vec3(pc.gradient.segment<3>(r)));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            if (S(i, j) != 0.0) trip.emplace_back(r + i, r + j, -0.5 * S(i, j));
      }
    }
    out.mortar = std::move(md);
  }

  out.energy.external_work = load_factor * p.external.dot(displacement_vector(p, s));
  out.residual -= load_factor * p.external;
  if (with_tangent) {
    out.tangent.resize(n, n);
    out.tangent.setFromTriplets(trip.begin(), trip.end());
  }
  return out;
}

}  // namespace beamtie
