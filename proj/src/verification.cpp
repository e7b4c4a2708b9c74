#include "beamtie/verification.hpp"

#include <cmath>

namespace beamtie {

TangentCheck tangent_check(const Problem& p, const State& s, double load_factor, double h) {
  const int n = p.dofs.size();
  const Eigen::MatrixXd K = Eigen::MatrixXd(assemble(p, s, load_factor, true).tangent);
  Eigen::MatrixXd Kfd = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (p.fixed[j]) continue;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    d[j] = h;
    State plus = s, minus = s;
    plus.update(p.dofs, d);
    minus.update(p.dofs, -d);
    Kfd.col(j) = (assemble(p, plus, load_factor, false).residual - assemble(p, minus, load_factor, false).residual) /
                 (2.0 * h);
  }
  TangentCheck out;
  double kmax = 0.0, emax = 0.0;
  for (int j = 0; j < n; ++j) {
    if (p.fixed[j]) continue;
    ++out.unknowns;
    for (int i = 0; i < n; ++i) {
      if (p.fixed[i]) continue;
      kmax = std::max(kmax, std::abs(K(i, j)));
      const double e = std::abs(K(i, j) - Kfd(i, j));
      if (e > emax) {
        emax = e;
        out.row = i;
        out.col = j;
      }
    }
  }
  out.max_rel_error = kmax > 0.0 ? emax / kmax : emax;
  return out;
}

State random_state(const Problem& p, std::mt19937_64& rng, double amplitude, double rot_amplitude) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  State s = State::reference(*p.model);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(p.dofs.size());
  for (int i = 0; i < d.size(); ++i) {
    const double a = p.dofs.is_rotation(i) ? rot_amplitude : amplitude;
    const double v = a * U(rng);
    if (!p.fixed[i]) d[i] = v;
  }
  s.update(p.dofs, d);
  return s;
}

std::vector<ConservationSample> conservation_suite(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double R = 0.05;
  std::vector<ConservationSample> out;
  for (int i = 0; i < count; ++i) {
    ConservationSample cs;
    cs.index = i;
    cs.kind = i % 2 ? SolidKind::tet4 : SolidKind::hex8;
    cs.curved = U(rng) < 0.5;
    cs.gap = R * (0.05 + 1.95 * U(rng));
    const Eigen::Vector2d a(-0.45 + 0.3 * U(rng), -0.45 + 0.9 * U(rng));
    const Eigen::Vector2d b(0.15 + 0.3 * U(rng), -0.45 + 0.9 * U(rng));
    const double amplitude = 0.05 * U(rng), rot = 0.5 * U(rng);
    const std::uint64_t state_seed = rng();
    for (Variant v : {Variant::cons, Variant::disp}) {
      const Model m = gap_sample_model(cs.kind, cs.curved, v, a, b, cs.gap);
      const Problem p(m);
      std::mt19937_64 srng(state_seed);
      const State s = random_state(p, srng, amplitude, rot);
      const AssembledSystem sys = assemble(p, s, 0.0, false);
      const ConservationAudit audit = conservation_audit(m, *p.mortar, *sys.mortar, s, sys.coupling_gradient);
      const double scale = audit.lambda_norm * audit.coupled_length;
      if (v == Variant::cons) {
        cs.cons = audit;
        cs.cons_force_ratio = audit.force.norm() / scale;
        cs.cons_moment_ratio = audit.moment.norm() / scale;
      } else {
        cs.disp = audit;
        cs.disp_moment_ratio = audit.moment.norm() / (scale * cs.gap);
      }
    }
    out.push_back(cs);
  }
  return out;
}

double max_beam_curvature(const Problem& p, const State& s) {
  const Model& m = *p.model;
  double out = 0.0;
  for (int e = 0; e < static_cast<int>(m.beam.elements.size()); ++e) {
    const auto& el = m.beam.elements[e];
    std::vector<double> xis = p.beam_geometry[e].xi;
    xis.push_back(0.0);
    for (double xi : xis) {
      const BeamStrains st = beam_strains(p.beam_geometry[e], s.beam[el.nodes[0]], s.beam[el.nodes[1]], xi);
      out = std::max(out, st.Omega.norm());
    }
  }
  return out;
}

double max_abs_s33(const Model& m, const State& s) {
  double out = 0.0;
  for (const Mat3& S : nodal_stresses(m.solid, m.material, s.u)) out = std::max(out, std::abs(S(2, 2)));
  return out;
}

double max_solid_displacement(const State& s) {
  double out = 0.0;
  for (int i = 0; i + 2 < s.u.size(); i += 3) out = std::max(out, s.u.segment<3>(i).norm());
  return out;
}

double mean_beam_displacement(const Model& m, const State& s, int component) {
  if (s.beam.empty()) return 0.0;
  double sum = 0.0;
  for (size_t k = 0; k < s.beam.size(); ++k) sum += s.beam[k].r[component] - m.beam.nodes[k].r0[component];
  return sum / static_cast<double>(s.beam.size());
}

}  // namespace beamtie
