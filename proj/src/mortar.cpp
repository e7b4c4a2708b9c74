#include "beamtie/mortar.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "beamtie/error.hpp"
#include "beamtie/parallel.hpp"

namespace beamtie {

namespace {

// Gauss–Legendre nodes and weights on [−1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// ψ_SB and its derivatives with respect to (θ1, θ2, facet node positions).
struct PsiResult {
  Vec3 value;
  Eigen::MatrixXd J;                   // 3 × (6 + 3NN)
  std::array<Eigen::MatrixXd, 3> H;    // per component
};

template <int NN>
PsiResult psi_kernel(const CouplingPoint& cp, FacetKind kind, const Eigen::MatrixXd& xf,
                     const BeamNodeState& a, const BeamNodeState& b, bool second) {
  constexpr int N = 3 * NN + 6;
  using DB = ad::Dual2<6>;
  using DS = ad::Dual2<3 * NN>;
  using D = ad::Dual2<N>;
  Vec3T<DB> th1, th2;
  for (int c = 0; c < 3; ++c) {
    th1[c] = DB::variable(0.0, c);
    th2[c] = DB::variable(0.0, 3 + c);
  }
  const Mat3T<DB> l1 = exp_map(th1) * Mat3T<DB>(a.triad);
  const Mat3T<DB> l2 = exp_map(th2) * Mat3T<DB>(b.triad);
  const Vec3T<DB> phi = relative_rotation(l1, l2);
  if (value(phi).norm() >= std::numbers::pi - 1e-6)
    throw InterpolationSingularity("beam element: nodal triads rotated by pi relative to each other");
  const Mat3T<DB> lb = exp_map(phi * DB(0.5 * (1.0 + cp.xi_beam))) * l1;

  std::vector<Vec3T<DS>> x(NN);
  for (int k = 0; k < NN; ++k)
    for (int c = 0; c < 3; ++c) x[k][c] = DS::variable(xf(k, c), 3 * k + c);
  const Mat3T<DS> lg = surface_triad<DS>(cp.triad, kind, x, cp.xi, cp.eta);

  Mat3T<D> LB, LG;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      LB(i, j) = lb(i, j).template embed<N>(0);
      LG(i, j) = lg(i, j).template embed<N>(6);
    }
  const Vec3T<D> psi = rv(LG * LB.transpose());
  PsiResult out;
  out.value = value(psi);
  if (out.value.norm() >= std::numbers::pi - 1e-3) {
    std::ostringstream os;
    os << "constraint out of range: relative rotation " << out.value.norm()
       << " rad between surface and beam triads on beam element " << cp.beam_element;
    throw ConstraintOutOfRange(os.str());
  }
  out.J.resize(3, N);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < N; ++i) out.J(c, i) = psi[c].grad(i);
    if (second) out.H[c] = psi[c].hessian();
  }
  return out;
}

PsiResult psi_kernel(const CouplingPoint& cp, FacetKind kind, const Eigen::MatrixXd& xf,
                     const BeamNodeState& a, const BeamNodeState& b, bool second) {
  switch (node_count(kind)) {
    case 3: return psi_kernel<3>(cp, kind, xf, a, b, second);
    case 4: return psi_kernel<4>(cp, kind, xf, a, b, second);
    case 6: return psi_kernel<6>(cp, kind, xf, a, b, second);
    case 8: return psi_kernel<8>(cp, kind, xf, a, b, second);
    case 9: return psi_kernel<9>(cp, kind, xf, a, b, second);
  }
  throw Error("unsupported facet kind");
}

// Interpolated averaged normal with derivatives over the union of the nodal patches.
struct NormalAtPoint {
  Vec3 n;
  std::vector<int> dofs;
  Eigen::MatrixXd J;
  std::array<Eigen::MatrixXd, 3> H;
};

NormalAtPoint normal_at_point(const SurfaceMesh& surf, const NormalField& field, int facet,
                              double xi, double eta, int order) {
  const Facet& f = surf.facets[facet];
  const FacetShapeEval sh = facet_shape_functions(f.kind, xi, eta);
  NormalAtPoint out;
  Vec3 s = Vec3::Zero();
  std::map<int, int> pos;
  for (size_t k = 0; k < f.nodes.size(); ++k) {
    const int sk = surf.surface_index[f.nodes[k]];
    s += sh.N[k] * field.normals[sk];
    if (order > 0)
      for (int d : field.derivs[sk].dofs) pos.emplace(d, 0);
  }
  const double len = s.norm();
  if (!(len > 0.0)) throw DegenerateNormal("interpolated normal vanishes");
  out.n = s / len;
  if (order == 0) return out;

  int m = 0;
  for (auto& [d, i] : pos) {
    i = m++;
    out.dofs.push_back(d);
  }
  Eigen::MatrixXd Js = Eigen::MatrixXd::Zero(3, m);
  std::array<Eigen::MatrixXd, 3> Hs;
  if (order > 1)
    for (auto& h : Hs) h = Eigen::MatrixXd::Zero(m, m);
  for (size_t k = 0; k < f.nodes.size(); ++k) {
    const NodalNormalDerivative& d = field.derivs[surf.surface_index[f.nodes[k]]];
    std::vector<int> map(d.dofs.size());
    for (size_t i = 0; i < d.dofs.size(); ++i) map[i] = pos[d.dofs[i]];
    for (size_t i = 0; i < map.size(); ++i) {
      Js.col(map[i]) += sh.N[k] * d.J.col(i);
      if (order > 1)
        for (size_t j = 0; j < map.size(); ++j)
          for (int c = 0; c < 3; ++c) Hs[c](map[i], map[j]) += sh.N[k] * d.H[c](i, j);
    }
  }
  using D3 = ad::Dual2<3>;
  Vec3T<D3> sd;
  for (int c = 0; c < 3; ++c) sd[c] = D3::variable(s[c], c);
  const Vec3T<D3> nd = normalized(sd);
  Mat3 P;
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 3; ++j) P(c, j) = nd[c].grad(j);
  out.J = P * Js;
  if (order > 1)
    for (int c = 0; c < 3; ++c) {
      Mat3 h2;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h2(i, j) = nd[c].hess(i, j);
      out.H[c] = Js.transpose() * h2 * Js;
      for (int j = 0; j < 3; ++j) out.H[c] += P(c, j) * Hs[j];
    }
  return out;
}

// Current positions in the global layout: solid x, beam r and t, zero rotations.
Eigen::VectorXd global_positions(const Model& model, const State& state) {
  const DofMap dofs(model);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dofs.size());
  for (int k = 0; k < dofs.solid_nodes; ++k)
    x.segment<3>(dofs.solid(k, 0)) = model.solid.X[k] + state.u.segment<3>(3 * k);
  for (int k = 0; k < dofs.beam_nodes; ++k) {
    x.segment<3>(dofs.beam_position(k, 0)) = state.beam[k].r;
    x.segment<3>(dofs.beam_tangent(k, 0)) = state.beam[k].t;
  }
  return x;
}

}  // namespace

MortarSetup build_mortar(const Model& model) {
  SegmentOptions opt;
  opt.gauss_points = model.coupling.gauss_points;
  return build_mortar(model, opt);
}

MortarSetup build_mortar(const Model& model, const SegmentOptions& opt) {
  MortarSetup setup;
  setup.surface = extract_surface(model.solid, model.coupling.face_sets);
  const SurfaceMesh& surf = setup.surface;
  const NormalField normals = averaged_normals(surf, model.solid, {});
  const BeamMesh& bm = model.beam;
  setup.kappa.assign(bm.node_count(), 0.0);
  setup.active.assign(bm.node_count(), 0);
  setup.coupled_length.assign(bm.elements.size(), 0.0);

  std::vector<double> gx, gw;
  gauss_legendre(opt.gauss_points, gx, gw);
  ProjectionOptions popt;

  for (int b : coupled_beams(model)) {
    double arc = 0.0;
    bool any = false;
    for (int e : bm.beams[b].elements) {
      const BeamElement& el = bm.elements[e];
      const BeamNodeState na = beam_reference_state(bm, el.nodes[0]);
      const BeamNodeState nb = beam_reference_state(bm, el.nodes[1]);
      int hint = -1;
      auto facet_at = [&](double xi) {
        const Vec3 p = hermite_eval(el.length, xi, na, nb).first;
        try {
          const ProjectionResult r = normal_projection(p, surf, model.solid, {}, normals, hint, popt);
          hint = r.facet;
          return r.facet;
        } catch (const ProjectionFailure&) {
          return -1;
        }
      };
      std::vector<double> xs;
      std::vector<int> fs;
      for (int k = 0; k < opt.samples; ++k) {
        xs.push_back(-1.0 + 2.0 * k / (opt.samples - 1));
        fs.push_back(facet_at(xs.back()));
      }
      // interval boundaries where the projected facet changes
      std::vector<double> cuts{-1.0};
      std::vector<int> owners{fs[0]};
      for (int k = 0; k + 1 < opt.samples; ++k) {
        if (fs[k] == fs[k + 1]) continue;
        // walk through facets crossed between two samples
        int cur = fs[k];
        double from = xs[k];
        for (int guard = 0; guard < 64; ++guard) {
          double lo = from, hi = xs[k + 1];
          while (hi - lo > opt.bisection_tol) {
            const double mid = 0.5 * (lo + hi);
            hint = cur;
            if (facet_at(mid) == cur) lo = mid;
            else hi = mid;
          }
          hint = cur;
          const int next = facet_at(hi);
          cuts.push_back(0.5 * (lo + hi));
          owners.push_back(next);
          if (next == fs[k + 1] || hi >= xs[k + 1]) break;
          cur = next;
          from = hi;
        }
      }
      cuts.push_back(1.0);

      for (size_t s = 0; s < owners.size(); ++s) {
        if (owners[s] < 0 || cuts[s + 1] - cuts[s] <= 0.0) continue;
        Segment seg{e, cuts[s], cuts[s + 1], owners[s]};
        const int sid = static_cast<int>(setup.segments.size());
        setup.segments.push_back(seg);
        const Facet& facet = surf.facets[seg.facet];
        const Eigen::MatrixXd Xf = facet_coordinates(model.solid, facet, {});
        std::vector<Vec3> fn;
        for (int n : facet.nodes) fn.push_back(normals.normals[surf.surface_index[n]]);
        const double mid = 0.5 * (seg.xi_a + seg.xi_b), half = 0.5 * (seg.xi_b - seg.xi_a);
        for (int g = 0; g < opt.gauss_points; ++g) {
          CouplingPoint cp;
          cp.segment = sid;
          cp.beam_element = e;
          cp.xi_beam = mid + half * gx[g];
          const auto [r0, dr0] = hermite_eval(el.length, cp.xi_beam, na, nb);
          cp.ds = half * gw[g] * dr0.norm();
          cp.phi = {0.5 * (1.0 - cp.xi_beam), 0.5 * (1.0 + cp.xi_beam)};
          cp.hermite = hermite_shape(cp.xi_beam, el.length).h;
          const ProjectionResult pr = project_normal_on_facet(r0, facet, Xf, fn, popt.max_iterations);
          if (!pr.converged || !inside_facet(facet.kind, pr.xi, pr.eta, 1e-6)) {
            std::ostringstream os;
            os << "setup error: projection failed for beam " << b << " at arc coordinate ~"
               << arc + 0.5 * (1.0 + cp.xi_beam) * el.length;
            throw SetupError(os.str());
          }
          cp.facet = seg.facet;
          cp.xi = pr.xi;
          cp.eta = pr.eta;
          cp.gap0 = pr.gap;
          cp.beam_point0 = r0;
          cp.surface_point0 = pr.point;
          if (model.coupling.rotational) {
            const Triad lb0 = geodesic_interpolate(na.triad, nb.triad, 0.5 * (1.0 + cp.xi_beam));
            cp.triad = surface_triad_reference(facet, Xf, cp.xi, cp.eta, lb0);
          }
          setup.kappa[el.nodes[0]] += cp.phi[0] * cp.ds;
          setup.kappa[el.nodes[1]] += cp.phi[1] * cp.ds;
          setup.coupled_length[e] += cp.ds;
          setup.points.push_back(cp);
          any = true;
        }
      }
      arc += el.length;
    }
    if (!any) {
      std::ostringstream os;
      os << "setup error: beam '" << bm.beams[b].name << "' does not project onto the coupling surface";
      throw SetupError(os.str());
    }
  }

  // deactivate multiplier nodes with negligible support
  std::vector<double> scale(bm.node_count(), 0.0);
  for (const auto& el : bm.elements)
    for (int n : el.nodes) scale[n] = std::max(scale[n], el.length);
  for (int k = 0; k < bm.node_count(); ++k)
    setup.active[k] = setup.kappa[k] >= 1e-12 * scale[k] && setup.kappa[k] > 0.0;
  return setup;
}

MortarData evaluate_mortar(const Model& model, const MortarSetup& setup, const State& state) {
  const DofMap dofs(model);
  const int n = dofs.size(), rows = 3 * dofs.beam_nodes;
  const SurfaceMesh& surf = setup.surface;
  MortarData out;
  out.kappa = setup.kappa;
  out.active = setup.active;

  std::vector<Eigen::Triplet<double>> td, tm;
  for (const CouplingPoint& cp : setup.points) {
    const BeamElement& el = model.beam.elements[cp.beam_element];
    const Facet& f = surf.facets[cp.facet];
    const FacetShapeEval sh = facet_shape_functions(f.kind, cp.xi, cp.eta);
    for (int j = 0; j < 2; ++j) {
      const int node = el.nodes[j];
      if (!setup.active[node]) continue;
      const double w = cp.phi[j] * cp.ds;
      for (int c = 0; c < 3; ++c) {
        const int row = 3 * node + c;
        td.emplace_back(row, dofs.beam_position(el.nodes[0], c), w * cp.hermite[0]);
        td.emplace_back(row, dofs.beam_tangent(el.nodes[0], c), w * cp.hermite[1]);
        td.emplace_back(row, dofs.beam_position(el.nodes[1], c), w * cp.hermite[2]);
        td.emplace_back(row, dofs.beam_tangent(el.nodes[1], c), w * cp.hermite[3]);
        for (size_t k = 0; k < f.nodes.size(); ++k) tm.emplace_back(row, dofs.solid(f.nodes[k], c), w * sh.N[k]);
      }
    }
  }
  out.D.resize(rows, n);
  out.M.resize(rows, n);
  out.D.setFromTriplets(td.begin(), td.end());
  out.M.setFromTriplets(tm.begin(), tm.end());
  out.Q.resize(rows, n);
  out.q = Eigen::VectorXd::Zero(rows);

  const Variant variant = model.coupling.variant;
  if (variant == Variant::disp) {
    const Eigen::VectorXd x0 = global_positions(model, State::reference(model));
    out.q = out.D * x0 - out.M * x0;
  } else if (variant == Variant::cons) {
    const NormalField field = averaged_normals(surf, model.solid, state.u, 1);
    std::vector<Eigen::Triplet<double>> tq;
    for (const CouplingPoint& cp : setup.points) {
      const BeamElement& el = model.beam.elements[cp.beam_element];
      const NormalAtPoint nh = normal_at_point(surf, field, cp.facet, cp.xi, cp.eta, 1);
      for (int j = 0; j < 2; ++j) {
        const int node = el.nodes[j];
        if (!setup.active[node]) continue;
        const double w = cp.phi[j] * cp.ds * cp.gap0;
        out.q.segment<3>(3 * node) += w * nh.n;
        for (int c = 0; c < 3; ++c)
          for (size_t i = 0; i < nh.dofs.size(); ++i) tq.emplace_back(3 * node + c, nh.dofs[i], -w * nh.J(c, i));
      }
    }
    out.Q.setFromTriplets(tq.begin(), tq.end());
  }
  const Eigen::VectorXd x = global_positions(model, state);
  out.r = out.D * x - out.M * x - out.q;

  out.r_theta = Eigen::VectorXd::Zero(rows);
  out.G_theta.resize(rows, n);
  if (model.coupling.rotational) {
    std::vector<PsiResult> psi(setup.points.size());
    parallel_for(static_cast<int>(setup.points.size()), [&](int i) {
      const CouplingPoint& cp = setup.points[i];
      const BeamElement& el = model.beam.elements[cp.beam_element];
      const Facet& f = surf.facets[cp.facet];
      psi[i] = psi_kernel(cp, f.kind, facet_coordinates(model.solid, f, state.u),
                          state.beam[el.nodes[0]], state.beam[el.nodes[1]], false);
    });
    std::vector<Eigen::Triplet<double>> tg;
    for (size_t i = 0; i < setup.points.size(); ++i) {
      const CouplingPoint& cp = setup.points[i];
      const BeamElement& el = model.beam.elements[cp.beam_element];
      const Facet& f = surf.facets[cp.facet];
      std::vector<int> cols;
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 3; ++c) cols.push_back(dofs.beam_rotation(el.nodes[a], c));
      for (int k : f.nodes)
        for (int c = 0; c < 3; ++c) cols.push_back(dofs.solid(k, c));
      for (int j = 0; j < 2; ++j) {
        const int node = el.nodes[j];
        if (!setup.active[node]) continue;
        const double w = cp.phi[j] * cp.ds;
        out.r_theta.segment<3>(3 * node) += w * psi[i].value;
        for (int c = 0; c < 3; ++c)
          for (size_t k = 0; k < cols.size(); ++k) tg.emplace_back(3 * node + c, cols[k], w * psi[i].J(c, k));
      }
    }
    out.G_theta.setFromTriplets(tg.begin(), tg.end());
  }
  return out;
}

Eigen::VectorXd positional_multipliers(const Model& model, const MortarData& data) {
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(data.r.size());
  for (size_t j = 0; j < data.kappa.size(); ++j)
    if (data.active[j]) lambda.segment<3>(3 * j) = model.coupling.eps_r / data.kappa[j] * data.r.segment<3>(3 * j);
  return lambda;
}

Eigen::VectorXd rotational_multipliers(const Model& model, const MortarData& data) {
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(data.r_theta.size());
  if (!model.coupling.rotational) return lambda;
  for (size_t j = 0; j < data.kappa.size(); ++j)
    if (data.active[j])
      lambda.segment<3>(3 * j) = model.coupling.eps_theta / data.kappa[j] * data.r_theta.segment<3>(3 * j);
  return lambda;
}

PenaltyContribution penalty_condense(const Model& model, const MortarSetup& setup,
                                     const MortarData& data, const State& state,
                                     bool with_tangent) {
  const DofMap dofs(model);
  const SurfaceMesh& surf = setup.surface;
  PenaltyContribution out;
  const int rows = static_cast<int>(data.r.size());
  Eigen::VectorXd winv = Eigen::VectorXd::Zero(rows);
  for (size_t j = 0; j < data.kappa.size(); ++j)
    if (data.active[j]) winv.segment<3>(3 * j).setConstant(1.0 / data.kappa[j]);

  const double er = model.coupling.eps_r, et = model.coupling.eps_theta;
  const Eigen::VectorXd lambda = positional_multipliers(model, data);
  out.energy_positional = 0.5 * er * data.r.dot(winv.cwiseProduct(data.r));
  const Eigen::SparseMatrix<double> G = data.D - data.M + data.Q;
  out.gradient = G.transpose() * lambda;

  const bool rot = model.coupling.rotational && et > 0.0;
  Eigen::VectorXd lambda_t;
  if (rot) {
    lambda_t = rotational_multipliers(model, data);
    out.energy_rotational = 0.5 * et * data.r_theta.dot(winv.cwiseProduct(data.r_theta));
    out.gradient += data.G_theta.transpose() * lambda_t;
  }
  if (!with_tangent) return out;

  auto append = [&](const Eigen::SparseMatrix<double>& A) {
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
        out.tangent.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  };
  const Eigen::VectorXd wr = er * winv;
  const Eigen::SparseMatrix<double> WG = wr.asDiagonal() * G;
  append(Eigen::SparseMatrix<double>(G.transpose() * WG));
  if (rot) {
    const Eigen::VectorXd wt = et * winv;
    const Eigen::SparseMatrix<double> WGt = wt.asDiagonal() * data.G_theta;
    append(Eigen::SparseMatrix<double>(data.G_theta.transpose() * WGt));
  }

  // second derivatives of the constraints contracted with the multipliers
  const int np = static_cast<int>(setup.points.size());
  std::vector<std::vector<Eigen::Triplet<double>>> local(np);
  NormalField field;
  const bool cons = model.coupling.variant == Variant::cons;
  if (cons) field = averaged_normals(surf, model.solid, state.u, 2);
  parallel_for(np, [&](int i) {
    const CouplingPoint& cp = setup.points[i];
    const BeamElement& el = model.beam.elements[cp.beam_element];
    auto& trip = local[i];
    if (cons && cp.gap0 != 0.0) {
      Vec3 coef = Vec3::Zero();
      for (int j = 0; j < 2; ++j) coef -= cp.phi[j] * cp.ds * cp.gap0 * lambda.segment<3>(3 * el.nodes[j]);
      if (coef.squaredNorm() > 0.0) {
        const NormalAtPoint nh = normal_at_point(surf, field, cp.facet, cp.xi, cp.eta, 2);
        const Eigen::MatrixXd H = coef[0] * nh.H[0] + coef[1] * nh.H[1] + coef[2] * nh.H[2];
        for (size_t a = 0; a < nh.dofs.size(); ++a)
          for (size_t b = 0; b < nh.dofs.size(); ++b)
            if (H(a, b) != 0.0) trip.emplace_back(nh.dofs[a], nh.dofs[b], H(a, b));
      }
    }
    if (rot) {
      Vec3 coef = Vec3::Zero();
      for (int j = 0; j < 2; ++j) coef += cp.phi[j] * cp.ds * lambda_t.segment<3>(3 * el.nodes[j]);
      const Facet& f = surf.facets[cp.facet];
      const PsiResult p = psi_kernel(cp, f.kind, facet_coordinates(model.solid, f, state.u),
                                     state.beam[el.nodes[0]], state.beam[el.nodes[1]], true);
      std::vector<int> cols;
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 3; ++c) cols.push_back(dofs.beam_rotation(el.nodes[a], c));
      for (int k : f.nodes)
        for (int c = 0; c < 3; ++c) cols.push_back(dofs.solid(k, c));
      const Eigen::MatrixXd H = coef[0] * p.H[0] + coef[1] * p.H[1] + coef[2] * p.H[2];
      for (size_t a = 0; a < cols.size(); ++a)
        for (size_t b = 0; b < cols.size(); ++b)
          if (H(a, b) != 0.0) trip.emplace_back(cols[a], cols[b], H(a, b));
    }
  });
  for (const auto& t : local) out.tangent.insert(out.tangent.end(), t.begin(), t.end());
  return out;
}

ConservationAudit conservation_audit(const Model& model, const MortarSetup& setup,
                                     const MortarData& data, const State& state,
                                     const Eigen::VectorXd& g) {
  const DofMap dofs(model);
  ConservationAudit a;
  for (int k = 0; k < dofs.solid_nodes; ++k) {
    const Vec3 f = g.segment<3>(dofs.solid(k, 0));
    a.force += f;
    a.moment += (model.solid.X[k] + state.u.segment<3>(3 * k)).cross(f);
  }
  for (int k = 0; k < dofs.beam_nodes; ++k) {
    const Vec3 fr = g.segment<3>(dofs.beam_position(k, 0));
    const Vec3 ft = g.segment<3>(dofs.beam_tangent(k, 0));
    a.force += fr;
    a.moment += state.beam[k].r.cross(fr) + state.beam[k].t.cross(ft) + Vec3(g.segment<3>(dofs.beam_rotation(k, 0)));
  }
  const Eigen::VectorXd lambda = positional_multipliers(model, data);
  for (size_t j = 0; j < data.kappa.size(); ++j)
    a.lambda_norm = std::max(a.lambda_norm, lambda.segment<3>(3 * j).norm());
  for (double l : setup.coupled_length) a.coupled_length += l;
  return a;
}

}  // namespace beamtie
