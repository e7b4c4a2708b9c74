#include "beamtie/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <numbers>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "beamtie/error.hpp"
#include "beamtie/generators.hpp"
#include "beamtie/solver.hpp"
#include "beamtie/surface.hpp"
#include "beamtie/verification.hpp"

namespace beamtie {

namespace {

constexpr double kPatchZero = 1e-9;
constexpr double kPatchSeconds = 30.0;
constexpr double kRefMeanLow = -0.0505, kRefMeanHigh = -0.0495;
constexpr double kCurvedEnergyRatio = 1e-2;
constexpr int kConservationSamples = 50;
constexpr std::uint64_t kConservationSeed = 20240917;
constexpr double kConsBalance = 1e-11;
constexpr double kDispImbalance = 1e-3;
constexpr double kHalfpipeZero = 1e-10;
constexpr double kPlateRatio = 0.7;
constexpr double kTangentTol = 1e-5;
constexpr double kRoundTrip = 1e-10;
constexpr double kNormPreserve = 1e-12;
constexpr double kTriadTol = 1e-12;
constexpr double kNormalContinuity = 1e-13;
constexpr double kSuiteSeconds = 5.0;
constexpr double kScalingLow = 0.4, kScalingHigh = 0.6;

const std::vector<SolidKind> kKinds{SolidKind::hex8, SolidKind::hex20, SolidKind::hex27, SolidKind::tet4,
                                    SolidKind::tet10};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  SolveResult result;
  double seconds = 0.0;
};

Run run(const Model& m, double load_scale = 1.0) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p(m);
  Run r{solve(p, load_scale), 0.0};
  r.seconds = seconds_since(t0);
  return r;
}

double elastic_energy(const SolveResult& r) { return r.final_system.energy.solid + r.final_system.energy.beam; }

double max_deflection(const State& s) {
  double w = 0.0;
  for (int i = 2; i < s.u.size(); i += 3) w = std::max(w, std::abs(s.u[i]));
  return w;
}

double max_constraint(const SolveResult& r) {
  return r.final_system.mortar ? r.final_system.mortar->r.cwiseAbs().maxCoeff() : 0.0;
}

void note(std::ostream* log, const std::string& line) {
  if (log) *log << "  " << line << '\n' << std::flush;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

CriterionResult planar_patch(std::ostream* log) {
  CriterionResult c{1, "planar constant stress transfer (CONS, DISP)"};
  c.pass = true;
  double u = 0, s33 = 0, kappa = 0, secs = 0;
  for (SolidKind kind : kKinds)
    for (Variant v : {Variant::cons, Variant::disp}) {
      PatchOptions opt;
      opt.kind = kind;
      opt.variant = v;
      const Model m = patch_model(opt);
      const Run r = run(m);
      const Problem p(m);
      const double mu = max_solid_displacement(r.result.state), ms = max_abs_s33(m, r.result.state),
                   mk = max_beam_curvature(p, r.result.state);
      note(log, to_string(kind) + " " + to_string(v) + ": max|u|=" + fmt(mu) + " max|S33|=" + fmt(ms) +
                    " max|curvature|=" + fmt(mk) + " t=" + fmt(r.seconds) + "s");
      u = std::max(u, mu);
      s33 = std::max(s33, ms);
      kappa = std::max(kappa, mk);
      secs = std::max(secs, r.seconds);
      if (mu > kPatchZero || ms > kPatchZero || mk > kPatchZero || r.seconds > kPatchSeconds) c.pass = false;
    }
  c.metrics = {{"max_u", u}, {"max_s33", s33}, {"max_curvature", kappa}, {"max_seconds", secs}};
  return c;
}

CriterionResult planar_ref(std::ostream* log) {
  CriterionResult c{2, "planar REF variant"};
  c.pass = true;
  double lo = 1e300, hi = -1e300, s33 = 0;
  for (SolidKind kind : kKinds) {
    PatchOptions opt;
    opt.kind = kind;
    opt.variant = Variant::ref;
    const Model m = patch_model(opt);
    const Run r = run(m);
    const double mean = mean_beam_displacement(m, r.result.state, 2), ms = max_abs_s33(m, r.result.state);
    note(log, to_string(kind) + ": mean beam u3=" + fmt(mean) + " max|S33|=" + fmt(ms));
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    s33 = std::max(s33, ms);
    if (mean < kRefMeanLow || mean > kRefMeanHigh || ms > kPatchZero) c.pass = false;
  }
  c.metrics = {{"mean_u3_min", lo}, {"mean_u3_max", hi}, {"max_s33", s33}};
  return c;
}

CriterionResult curved_patch(std::ostream* log) {
  CriterionResult c{3, "curved constant stress transfer energy ordering"};
  c.pass = true;
  double worst = 0;
  for (SolidKind kind : kKinds) {
    std::map<Variant, double> energy;
    for (Variant v : {Variant::ref, Variant::cons, Variant::disp}) {
      PatchOptions opt;
      opt.kind = kind;
      opt.curved = true;
      opt.variant = v;
      opt.published_load_factor = true;
      energy[v] = elastic_energy(run(patch_model(opt)).result);
    }
    const double rc = energy[Variant::cons] / energy[Variant::ref], rd = energy[Variant::disp] / energy[Variant::ref];
    note(log, to_string(kind) + ": E_ref=" + fmt(energy[Variant::ref]) + " E_cons/E_ref=" + fmt(rc) +
                  " E_disp/E_ref=" + fmt(rd));
    worst = std::max({worst, rc, rd});
    if (!(energy[Variant::ref] > 0.0) || rc > kCurvedEnergyRatio || rd > kCurvedEnergyRatio) c.pass = false;
  }
  c.metrics = {{"max_energy_ratio", worst}};
  return c;
}

CriterionResult conservation(std::ostream* log) {
  CriterionResult c{4, "conservation property suite"};
  double f = 0, m = 0, d = 1e300;
  for (const ConservationSample& s : conservation_suite(kConservationSamples, kConservationSeed)) {
    f = std::max(f, s.cons_force_ratio);
    m = std::max(m, s.cons_moment_ratio);
    d = std::min(d, s.disp_moment_ratio);
  }
  note(log, std::to_string(kConservationSamples) + " samples: CONS |F|/(λL) max=" + fmt(f) + " |M|/(λL) max=" +
                fmt(m) + "; DISP |M|/(λ g L) min=" + fmt(d));
  c.pass = f <= kConsBalance && m <= kConsBalance && d > kDispImbalance;
  c.metrics = {{"cons_force_ratio", f}, {"cons_moment_ratio", m}, {"disp_moment_ratio_min", d}};
  return c;
}

CriterionResult halfpipe(std::ostream* log) {
  CriterionResult c{5, "unloaded half-pipe pattern (0, 0, nonzero)"};
  std::map<Variant, std::pair<double, double>> out;
  for (Variant v : {Variant::cons, Variant::disp, Variant::ref}) {
    Model m = halfpipe_model(v);
    m.point_loads.clear();
    const Run r = run(m);
    out[v] = {max_solid_displacement(r.result.state), r.result.final_system.energy.internal()};
    note(log, to_string(v) + ": max|u|=" + fmt(out[v].first) + " energy=" + fmt(out[v].second));
  }
  c.pass = true;
  for (Variant v : {Variant::cons, Variant::disp})
    if (out[v].first > kHalfpipeZero || std::abs(out[v].second) > kHalfpipeZero) c.pass = false;
  if (!(out[Variant::ref].second > 0.0)) c.pass = false;
  c.metrics = {{"cons_u", out[Variant::cons].first},   {"cons_energy", out[Variant::cons].second},
               {"disp_u", out[Variant::disp].first},   {"disp_energy", out[Variant::disp].second},
               {"ref_energy", out[Variant::ref].second}};
  return c;
}

struct PlateRuns {
  double full = 0, positional = 0, r100 = 0, r200 = 0;
  bool done = false;
};

PlateRuns& plate_runs(std::ostream* log) {
  static PlateRuns p;
  if (p.done) return p;
  const Run full = run(plate_model(true));
  p.full = max_deflection(full.result.state);
  p.r100 = max_constraint(full.result);
  note(log, "plate full coupling: max deflection=" + fmt(p.full) + " |r|inf=" + fmt(p.r100) + " t=" + fmt(full.seconds) + "s");
  const Run pos = run(plate_model(false));
  p.positional = max_deflection(pos.result.state);
  note(log, "plate positional only: max deflection=" + fmt(p.positional) + " t=" + fmt(pos.seconds) + "s");
  Model m = plate_model(true);
  m.coupling.eps_r *= 2.0;
  const Run twice = run(m);
  p.r200 = max_constraint(twice.result);
  note(log, "plate eps_r doubled: |r|inf=" + fmt(p.r200) + " t=" + fmt(twice.seconds) + "s");
  p.done = true;
  return p;
}

CriterionResult plate(std::ostream* log) {
  CriterionResult c{6, "supported-plate stiffening"};
  const PlateRuns& p = plate_runs(log);
  const double ratio = p.full / p.positional;
  c.pass = ratio < kPlateRatio;
  c.metrics = {{"full_deflection", p.full}, {"positional_deflection", p.positional}, {"ratio", ratio}};
  return c;
}

CriterionResult tangent(std::ostream* log) {
  CriterionResult c{7, "tangent consistency and quadratic convergence"};
  Model m = gap_sample_model(SolidKind::hex8, true, Variant::cons, {-0.4, -0.3}, {0.4, 0.3}, 0.05, 4);
  m.point_loads.push_back({4, Vec3(0.0, 0.02, 0.05)});
  m.solve.steps = 1;
  const Problem p(m);
  std::mt19937_64 rng(11);
  const TangentCheck random = tangent_check(p, random_state(p, rng, 0.03, 0.3), 1.0);
  const SolveResult r = solve(p);
  const TangentCheck converged = tangent_check(p, r.state, 1.0);
  std::vector<double> norms;
  std::ostringstream hist;
  for (const auto& h : r.history) {
    norms.push_back(h.residual_norm);
    hist << ' ' << fmt(h.residual_norm);
  }
  const bool quad = quadratic_tail(norms);
  note(log, std::to_string(random.unknowns) + " free unknowns; FD error random state=" + fmt(random.max_rel_error) +
                " converged state=" + fmt(converged.max_rel_error) + "; residuals:" + hist.str());
  c.pass = random.max_rel_error <= kTangentTol && converged.max_rel_error <= kTangentTol && quad &&
           p.dofs.size() <= 500;
  const size_t n = norms.size();
  c.metrics = {{"unknowns", static_cast<double>(p.dofs.size())},
               {"fd_error_random", random.max_rel_error},
               {"fd_error_converged", converged.max_rel_error},
               {"last_ratio", n >= 2 ? norms[n - 1] / norms[n - 2] : 0.0},
               {"quadratic_tail", quad ? 1.0 : 0.0}};
  return c;
}

std::array<double, 2> facet_param(const Facet& f, int node) {
  const auto params = parent_nodes(f.kind);
  for (size_t a = 0; a < f.nodes.size(); ++a)
    if (f.nodes[a] == node) return params[a];
  throw Error("node not on facet");
}

CriterionResult property_suites(std::ostream* log) {
  CriterionResult c{8, "SO(3) and triad property suites"};
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto unit = [&] {
    Vec3 v(U(rng), U(rng), U(rng));
    while (v.norm() < 1e-3) v = Vec3(U(rng), U(rng), U(rng));
    return Vec3(v.normalized());
  };

  double round_trip = 0, norm_err = 0, antisym = 0;
  for (int i = 0; i < 2000; ++i) {
    const double angle = std::abs(U(rng)) * (std::numbers::pi - 1e-6);
    const Vec3 psi = angle * unit();
    const Triad L = exp_map(RotationVector(psi));
    round_trip = std::max(round_trip, (exp_map(rv(L)) - L).norm());
    round_trip = std::max(round_trip, (Vec3(rv(L)) - psi).norm());
    const Vec3 v = 10.0 * Vec3(U(rng), U(rng), U(rng));
    norm_err = std::max(norm_err, std::abs((L * v).norm() - v.norm()) / std::max(1.0, v.norm()));
    const Triad L2 = exp_map(RotationVector(2.0 * unit()));
    antisym = std::max(antisym, (exp_map(relative_rotation(L, L2)) - exp_map(relative_rotation(L2, L)).transpose()).norm());
  }

  // surface triad objectivity, interior invariance, rank-one invariance and normal continuity
  double objectivity = 0, interior = 0, rank_one = 0, continuity = 0;
  for (SolidKind kind : kKinds) {
    PatchOptions opt;
    opt.kind = kind;
    opt.curved = true;
    const Model m = patch_model(opt);
    const SurfaceMesh s = extract_surface(m.solid, {"w1"});
    const NormalField nf = averaged_normals(s, m.solid, {});
    for (int f = 0; f < s.facet_count(); ++f)
      for (int g : s.neighbors[f]) {
        if (g <= f) continue;
        std::vector<int> shared;
        const int corners = is_quad(s.facets[f].kind) ? 4 : 3;
        const int corners_g = is_quad(s.facets[g].kind) ? 4 : 3;
        for (int a = 0; a < corners; ++a)
          for (int b = 0; b < corners_g; ++b)
            if (s.facets[f].nodes[a] == s.facets[g].nodes[b]) shared.push_back(s.facets[f].nodes[a]);
        if (shared.size() != 2) continue;
        const auto pa = facet_param(s.facets[f], shared[0]), pb = facet_param(s.facets[f], shared[1]);
        const auto qa = facet_param(s.facets[g], shared[0]), qb = facet_param(s.facets[g], shared[1]);
        for (int k = 0; k < 10; ++k) {
          const double t = (k + 0.5) / 10.0;
          const Vec3 n1 = interpolate_normal(s, nf, f, pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]));
          const Vec3 n2 = interpolate_normal(s, nf, g, qa[0] + t * (qb[0] - qa[0]), qa[1] + t * (qb[1] - qa[1]));
          continuity = std::max(continuity, (n1 - n2).norm());
        }
      }

    const int f = s.facet_count() / 2;
    const auto centre = facet_center(s.facets[f].kind);
    const double xi = centre[0] + 0.05, eta = centre[1] - 0.03;
    const Eigen::MatrixXd Xf = facet_coordinates(m.solid, s.facets[f], {});
    const Vec3 tangent = facet_point(s.facets[f], Xf, xi, eta).x_xi.normalized();
    const Triad beam_ref = exp_map(RotationVector(0.3 * tangent)) * smallest_rotation_from_e1(tangent);
    const SurfaceTriadData data = surface_triad_reference(s.facets[f], Xf, xi, eta, beam_ref);
    auto triad = [&](const Eigen::VectorXd& u) {
      return surface_triad(data, s.facets[f], facet_coordinates(m.solid, s.facets[f], u), xi, eta);
    };
    const int nn = m.solid.node_count();
    Eigen::VectorXd d(3 * nn);
    for (int i = 0; i < d.size(); ++i) d[i] = 0.05 * U(rng);
    const Triad base = triad(d);
    for (int trial = 0; trial < 5; ++trial) {
      const Mat3 R = exp_map(RotationVector(2.5 * unit()));
      const Vec3 shift = unit();
      Eigen::VectorXd dr(d.size());
      for (int k = 0; k < nn; ++k) dr.segment<3>(3 * k) = R * (m.solid.X[k] + d.segment<3>(3 * k)) + shift - m.solid.X[k];
      objectivity = std::max(objectivity, (triad(dr) - R * base).norm());
    }
    Eigen::VectorXd di = Eigen::VectorXd::Zero(3 * nn);
    for (int k = 0; k < nn; ++k)
      if (s.surface_index[k] < 0) di.segment<3>(3 * k) = 0.1 * Vec3(U(rng), U(rng), U(rng));
    interior = std::max(interior, (triad(di) - beam_ref).norm());

    const Vec3 N = facet_normal(s.facets[f], Xf, xi, eta);
    const Mat3 F = Mat3::Identity() + 0.2 * Mat3::Random();
    const Vec3 a = 0.3 * Vec3(U(rng), U(rng), U(rng));
    Eigen::MatrixXd x1 = Xf, x2 = Xf;
    for (int k = 0; k < Xf.rows(); ++k) {
      const Vec3 X = Xf.row(k).transpose();
      const Vec3 Xc = X - Vec3(facet_point(s.facets[f], Xf, xi, eta).x);
      x1.row(k) = (F * Xc).transpose();
      x2.row(k) = ((F + a * N.transpose()) * Xc).transpose();
    }
    rank_one = std::max(rank_one, (surface_triad(data, s.facets[f], x1, xi, eta) -
                                   surface_triad(data, s.facets[f], x2, xi, eta)).norm());
  }
  c.seconds = seconds_since(t0);
  note(log, "round trip=" + fmt(round_trip) + " norm preservation=" + fmt(norm_err) + " relative antisymmetry=" +
                fmt(antisym) + " triad objectivity=" + fmt(objectivity) + " interior invariance=" + fmt(interior) +
                " rank-one invariance=" + fmt(rank_one) + " normal continuity=" + fmt(continuity));
  c.pass = round_trip <= kRoundTrip && norm_err <= kNormPreserve && antisym <= kRoundTrip &&
           objectivity <= kTriadTol && interior <= kTriadTol && rank_one <= kTriadTol &&
           continuity <= kNormalContinuity && c.seconds < kSuiteSeconds;
  c.metrics = {{"round_trip", round_trip},   {"norm_preservation", norm_err}, {"relative_antisymmetry", antisym},
               {"triad_objectivity", objectivity}, {"interior_invariance", interior},
               {"rank_one_invariance", rank_one}, {"normal_continuity", continuity}};
  return c;
}

CriterionResult scaling(std::ostream* log) {
  CriterionResult c{9, "penalty scaling law"};
  const PlateRuns& p = plate_runs(log);
  const double ratio = p.r200 / p.r100;
  c.pass = ratio >= kScalingLow && ratio <= kScalingHigh;
  c.metrics = {{"r_inf_eps", p.r100}, {"r_inf_2eps", p.r200}, {"ratio", ratio}};
  return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& criteria, std::ostream* log) {
  const std::vector<std::function<CriterionResult(std::ostream*)>> all{
      planar_patch, planar_ref, curved_patch, conservation, halfpipe, plate, tangent, property_suites, scaling};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= static_cast<int>(all.size()); ++id) {
    if (!criteria.empty() && std::find(criteria.begin(), criteria.end(), id) == criteria.end()) continue;
    if (log) *log << "criterion " << id << '\n';
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[id - 1](log);
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "criterion " + std::to_string(id);
      r.pass = false;
      r.detail = e.what();
    }
    if (r.seconds == 0.0) r.seconds = seconds_since(t0);
    out.push_back(r);
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.title << " |";
  for (const auto& [k, v] : r.metrics) os << ' ' << k << '=' << std::setprecision(6) << v;
  os << " time=" << std::setprecision(3) << r.seconds << 's';
  if (!r.detail.empty()) os << " error: " << r.detail;
  return os.str();
}

}  // namespace beamtie
