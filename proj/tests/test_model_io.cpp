#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "beamtie/error.hpp"
#include "beamtie/generators.hpp"
#include "beamtie/model_io.hpp"
#include "beamtie/verification.hpp"

using namespace beamtie;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "beamtie_model_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string error_of(const json& j) {
  try {
    model_from_json(j);
  } catch (const ModelError& e) {
    return e.what();
  }
  return "";
}

json minimal_json() {
  return json::parse(R"({
    "name": "tiny",
    "solid": {
      "nodes": [[0,0,0],[1,0,0],[1,1,0],[0,1,0],[0,0,1],[1,0,1],[1,1,1],[0,1,1]],
      "elements": [{"type": "hex8", "nodes": [0,1,2,3,4,5,6,7]}],
      "face_sets": {"top": [[0, 5]]},
      "node_sets": {"bottom": [0,1,2,3]},
      "material": {"model": "saint_venant_kirchhoff", "E": 1.0, "nu": 0.3}
    },
    "beam": {
      "sections": [{"radius": 0.05, "E": 100.0}],
      "nodes": [{"position": [0.2,0.5,1.0], "tangent": [1,0,0]},
                {"position": [0.8,0.5,1.0], "tangent": [1,0,0]}],
      "elements": [{"nodes": [0, 1]}]
    },
    "supports": {"solid": [{"node_set": "bottom"}]},
    "loads": {"point": [{"node": 1, "force": [0, 0, 1e-3]}]},
    "coupling": {"variant": "cons", "face_sets": ["top"]}
  })");
}

}  // namespace

TEST(ModelIO, MinimalFileLoads) {
  const Model m = model_from_json(minimal_json());
  EXPECT_EQ(m.solid.node_count(), 8);
  EXPECT_EQ(m.beam.node_count(), 2);
  ASSERT_EQ(m.beam.beams.size(), 1u);
  EXPECT_NEAR(m.beam.elements[0].length, 0.6, 1e-12);
  EXPECT_NEAR((m.beam.nodes[0].triad0.col(0) - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_EQ(m.coupling.variant, Variant::cons);
}

TEST(ModelIO, RoundTripIsExact) {
  for (const std::string& name : example_names()) {
    const Model a = example_model(name);
    const Model b = model_from_json(model_to_json(a));
    std::string why;
    EXPECT_TRUE(models_equivalent(a, b, 1e-15, &why)) << name << ": " << why;
  }
}

TEST(ModelIO, SaveLoadThroughFile) {
  PatchOptions opt;
  opt.kind = SolidKind::tet10;
  opt.curved = true;
  const Model a = patch_model(opt);
  const auto path = scratch("patch.json");
  save_model(a, path.string());
  const Model b = load_model(path.string());
  std::string why;
  EXPECT_TRUE(models_equivalent(a, b, 1e-15, &why)) << why;
  save_model(b, scratch("patch2.json").string());
  EXPECT_EQ(slurp(path), slurp(scratch("patch2.json")));
}

TEST(ModelIO, DiagnosticsCarryJsonPath) {
  json j = minimal_json();
  j["beam"]["nodes"][1]["tangent"] = {0, 0};
  EXPECT_NE(error_of(j).find("$.beam.nodes[1].tangent"), std::string::npos) << error_of(j);

  j = minimal_json();
  j["coupling"]["face_sets"] = {"top", "side"};
  EXPECT_NE(error_of(j).find("$.coupling.face_sets[1]: unknown face set 'side'"), std::string::npos) << error_of(j);

  j = minimal_json();
  j["solid"]["face_sets"]["top"][0] = {3, 0};
  EXPECT_NE(error_of(j).find("$.solid.face_sets.top[0][0]: element 3 does not exist"), std::string::npos)
      << error_of(j);

  j = minimal_json();
  j["solid"]["elements"][0]["nodes"][7] = 12;
  EXPECT_NE(error_of(j).find("$.solid.elements[0].nodes[7]"), std::string::npos) << error_of(j);

  j = minimal_json();
  j["solid"]["material"].erase("E");
  EXPECT_NE(error_of(j).find("$.solid.material: missing required key 'E'"), std::string::npos) << error_of(j);

  j = minimal_json();
  j["coupling"]["variant"] = "mesh";
  EXPECT_NE(error_of(j).find("$.coupling.variant"), std::string::npos) << error_of(j);

  j = minimal_json();
  j["loads"]["gravity"] = 9.81;
  EXPECT_NE(error_of(j).find("$.loads: unknown key 'gravity'"), std::string::npos) << error_of(j);

  j = minimal_json();
  j["coupling"]["eps_r"] = -1.0;
  EXPECT_NE(error_of(j).find("$:"), std::string::npos) << error_of(j);
}

TEST(ModelIO, VariantNamesAreCaseInsensitive) {
  json j = minimal_json();
  j["coupling"]["variant"] = "DISP";
  EXPECT_EQ(model_from_json(j).coupling.variant, Variant::disp);
}

TEST(ModelIO, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ModelIO, ExportsAreDeterministicAndSized) {
  PatchOptions opt;
  opt.kind = SolidKind::hex20;
  const Model m = patch_model(opt);
  const Problem p(m);
  const SolveResult r = solve(p);
  const auto vtu1 = scratch("a.vtu"), vtu2 = scratch("b.vtu"), vtp1 = scratch("a.vtp"), vtp2 = scratch("b.vtp");
  write_solid_vtu(vtu1.string(), m, r.state);
  write_solid_vtu(vtu2.string(), m, r.state);
  write_beam_vtp(vtp1.string(), p, r.state, r.final_system.mortar);
  write_beam_vtp(vtp2.string(), p, r.state, r.final_system.mortar);
  EXPECT_EQ(slurp(vtu1), slurp(vtu2));
  EXPECT_EQ(slurp(vtp1), slurp(vtp2));

  const std::string vtp = slurp(vtp1);
  const int points = 5 * static_cast<int>(m.beam.elements.size());
  EXPECT_NE(vtp.find("NumberOfPoints=\"" + std::to_string(points) + "\""), std::string::npos);
  EXPECT_NE(vtp.find("Name=\"lambda\""), std::string::npos);
  const std::string vtu = slurp(vtu1);
  EXPECT_NE(vtu.find("NumberOfPoints=\"" + std::to_string(m.solid.node_count()) + "\""), std::string::npos);
  EXPECT_NE(vtu.find(" 25\n"), std::string::npos);  // hex20 cell type

  std::smatch match;
  const std::regex s33("Name=\"S33\" format=\"ascii\">\\n([^<]*)<");
  ASSERT_TRUE(std::regex_search(vtu, match, s33));
  std::istringstream values(match[1].str());
  double v, worst = 0.0;
  while (values >> v) worst = std::max(worst, std::abs(v));
  EXPECT_LE(worst, 1e-10);
}

TEST(ModelIO, ReferenceStateExportsZeros) {
  const Model m = minimal_model();
  const Problem p(m);
  const State s = State::reference(m);
  const auto vtp = scratch("zero.vtp");
  write_beam_vtp(vtp.string(), p, s, std::nullopt, 3);
  const std::string text = slurp(vtp);
  const auto begin = text.find("Name=\"displacement\"");
  const auto end = text.find("Name=\"curvature_mid\"");
  ASSERT_NE(begin, std::string::npos);
  const std::string block = text.substr(begin, end - begin);
  EXPECT_EQ(std::regex_search(block, std::regex("[1-9]e|[0-9]\\.[0-9]*[1-9]")), false) << block;
}

TEST(ModelIO, ReportsContainSummary) {
  const Model m = minimal_model();
  const Problem p(m);
  const SolveResult r = solve(p);
  const RunSummary s = summarize(p, r);
  const std::string text = text_report(s);
  EXPECT_NE(text.find("constraint |r|_inf"), std::string::npos);
  const auto j = json_report(s);
  EXPECT_EQ(j["model"], m.name);
  EXPECT_EQ(j["history"].size(), r.history.size());
  EXPECT_DOUBLE_EQ(j["energy"]["solid"].get<double>(), r.final_system.energy.solid);
}
