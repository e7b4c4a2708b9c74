#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>

#include "beamtie/error.hpp"
#include "beamtie/generators.hpp"
#include "beamtie/solver.hpp"
#include "beamtie/verification.hpp"

using namespace beamtie;

namespace {

Model cantilever(int elements, double L, double R, double force) {
  Model m;
  std::vector<Vec3> r, t;
  for (int k = 0; k <= elements; ++k) {
    r.emplace_back(L * k / elements, 0, 0);
    t.emplace_back(1, 0, 0);
  }
  add_beam(m, "c", r, t, {R, 100.0, 0.0});
  m.beam_dirichlet.push_back({0, true, true, true});
  m.point_loads.push_back({elements, Vec3(0, 0, force)});
  m.solve.steps = 1;
  return m;
}

}  // namespace

TEST(Solver, CantileverMatchesEulerBernoulli) {
  const double L = 1.0, R = 0.05, F = 1e-5;
  const Model m = cantilever(10, L, R, F);
  const Problem p(m);
  const SolveResult r = solve(p);
  const double EI = 100.0 * std::numbers::pi * std::pow(R, 4) / 4.0;
  const double expected = F * L * L * L / (3.0 * EI);
  const double tip = r.state.beam.back().r.z();
  EXPECT_NEAR(tip, expected, 0.01 * expected);
}

TEST(Solver, ZeroLoadConvergesImmediately) {
  Model m = cantilever(8, 1.0, 0.05, 0.0);
  const Problem p(m);
  const SolveResult r = solve(p);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.history[0].iteration, 0);
  EXPECT_EQ(r.history[0].residual_norm, 0.0);
}

TEST(Solver, RefVariantWithGapDeforms) {
  PatchOptions opt;
  opt.variant = Variant::ref;
  Model m = patch_model(opt);
  m.line_loads.clear();
  const Problem p(m);
  const SolveResult r = solve(p);
  EXPECT_NEAR(mean_beam_displacement(m, r.state, 2), -0.05, 1e-4);
  EXPECT_GT(r.final_system.energy.internal(), 0.0);
}

TEST(Solver, PlanarPatchTransfersLoadWithoutSolidDeformation) {
  PatchOptions opt;
  opt.kind = SolidKind::tet4;
  const Model m = patch_model(opt);
  const Problem p(m);
  const SolveResult r = solve(p);
  EXPECT_LT(max_solid_displacement(r.state), 1e-9);
  EXPECT_NEAR(mean_beam_displacement(m, r.state, 2), (6 * 2.5e-4 - 8 * 2.5e-4) / 14.0, 1e-12);
}

TEST(Solver, ConvergedStateReassemblesToTolerance) {
  const Model m = minimal_model();
  const Problem p(m);
  const SolveResult r = solve(p);
  const AssembledSystem again = assemble(p, r.state, r.load_factor, false);
  EXPECT_EQ(free_norm(p, again.residual), free_norm(p, r.final_system.residual));
  EXPECT_LE(free_norm(p, again.residual), std::max(m.solve.rel_tol * r.history.front().residual_norm, m.solve.abs_tol));
}

TEST(Solver, AssemblyIsBitReproducibleAcrossThreadCounts) {
  const Model m = gap_sample_model(SolidKind::tet10, true, Variant::cons, {-0.3, -0.3}, {0.4, 0.2}, 0.04);
  const Problem p(m);
  std::mt19937_64 rng(1);
  const State s = random_state(p, rng, 0.02, 0.2);
  setenv("BEAMTIE_THREADS", "1", 1);
  const AssembledSystem a = assemble(p, s, 1.0, true);
  setenv("BEAMTIE_THREADS", "4", 1);
  const AssembledSystem b = assemble(p, s, 1.0, true);
  unsetenv("BEAMTIE_THREADS");
  EXPECT_EQ(a.residual, b.residual);
  EXPECT_EQ(Eigen::MatrixXd(a.tangent), Eigen::MatrixXd(b.tangent));
}

TEST(Solver, UnsupportedSolidIsSingular) {
  Model m = minimal_model();
  m.solid_dirichlet.clear();
  const Problem p(m);
  try {
    solve(p);
    FAIL() << "expected SingularMatrix";
  } catch (const SingularMatrix& e) {
    EXPECT_NE(std::string(e.what()).find("singular"), std::string::npos);
  }
}

TEST(Solver, FreeUnknownWithoutStiffnessIsNamed) {
  Model m = cantilever(2, 1.0, 0.05, 1e-4);
  m.solid = structured_solid(SolidKind::hex8, 1, 1, 1, [](double u, double v, double w) { return Vec3(u, v, w + 5); });
  m.material = {MaterialKind::SaintVenantKirchhoff, 1.0, 0.0};
  m.solid.elements.clear();
  m.solid.face_sets.clear();
  const Problem p(m);
  try {
    solve(p);
    FAIL() << "expected SingularMatrix";
  } catch (const SingularMatrix& e) {
    EXPECT_NE(std::string(e.what()).find("solid node 0"), std::string::npos) << e.what();
  }
}

TEST(Solver, NonConvergenceReportsResidualTrace) {
  Model m = cantilever(8, 1.0, 0.05, 2e-2);
  m.solve.max_iterations = 2;
  const Problem p(m);
  try {
    solve(p);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[0]"), std::string::npos);
    EXPECT_NE(what.find("[2]"), std::string::npos);
    EXPECT_NE(what.find("load steps"), std::string::npos);
  }
}

TEST(Solver, StepCallbackSeesEveryStep) {
  Model m = cantilever(8, 1.0, 0.05, 1e-4);
  m.solve.steps = 4;
  const Problem p(m);
  std::vector<double> factors;
  solve(p, 2.0, [&](int, double lf, const State&, const AssembledSystem&) { factors.push_back(lf); });
  ASSERT_EQ(factors.size(), 4u);
  EXPECT_DOUBLE_EQ(factors[0], 0.5);
  EXPECT_DOUBLE_EQ(factors[3], 2.0);
}

TEST(Solver, QuadraticTailRule) {
  EXPECT_TRUE(quadratic_tail({1.0, 1e-2, 1e-5}));
  EXPECT_TRUE(quadratic_tail({1.0, 1e-3, 2e-6, 1e-11}));
  EXPECT_FALSE(quadratic_tail({1.0, 0.5, 0.25}));  // linear
  EXPECT_FALSE(quadratic_tail({1.0, 1e-2, 1e-4}));  // last ratio too large
  EXPECT_FALSE(quadratic_tail({1.0, 1e-6, 1e-10}));  // ratio fine but slower than the quadratic prediction
  EXPECT_FALSE(quadratic_tail({1.0, 1e-3}));
}

TEST(Solver, PenaltyViolationScalesInversely) {
  Model m = gap_sample_model(SolidKind::hex8, false, Variant::cons, {-0.4, -0.2}, {0.4, 0.2}, 0.05, 4);
  m.point_loads.push_back({2, Vec3(0, 0, 1e-3)});
  m.solve.steps = 1;
  double prev = 0.0;
  for (double eps : {100.0, 200.0}) {
    m.coupling.eps_r = eps;
    const Problem p(m);
    const SolveResult r = solve(p);
    const double v = r.final_system.mortar->r.cwiseAbs().maxCoeff();
    if (prev > 0.0) {
      EXPECT_GT(v / prev, 0.4);
      EXPECT_LT(v / prev, 0.6);
    }
    prev = v;
  }
}
