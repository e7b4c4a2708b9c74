#include <gtest/gtest.h>

#include <fstream>

#include "beamtie/generators.hpp"
#include "beamtie/model_io.hpp"
#include "beamtie/verification.hpp"

using namespace beamtie;

namespace {

// frozen runs drift by round-off only
constexpr double kRel = 1e-8;
constexpr double kAbs = 1e-14;

void expect_close(double got, double want, const std::string& what) {
  EXPECT_NEAR(got, want, kAbs + kRel * std::abs(want)) << what;
}

}  // namespace

TEST(Oracles, FrozenRunsReproduce) {
  std::ifstream in(BEAMTIE_ORACLE_DIR "/frozen_runs.json");
  ASSERT_TRUE(in.good());
  const nlohmann::json oracles = nlohmann::json::parse(in);
  for (const auto& [key, want] : oracles.items()) {
    const auto slash = key.find('/');
    Model m = example_model(key.substr(0, slash));
    m.coupling.variant = variant_from_string(key.substr(slash + 1));
    const Problem p(m);
    const RunSummary s = summarize(p, solve(p));
    expect_close(s.energy.solid, want["solid_energy"], key + " solid energy");
    expect_close(s.energy.beam, want["beam_energy"], key + " beam energy");
    expect_close(s.constraint_inf, want["constraint_inf"], key + " constraint");
    expect_close(s.max_solid_displacement, want["max_solid_displacement"], key + " max |u|");
    for (int c = 0; c < 3; ++c)
      expect_close(s.mean_beam_displacement[c], want["mean_beam_displacement"][c], key + " mean beam u");
  }
}
