#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>

#include "beamtie/acceptance.hpp"
#include "beamtie/error.hpp"
#include "beamtie/generators.hpp"
#include "beamtie/model_io.hpp"
#include "beamtie/verification.hpp"

using namespace beamtie;
namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<std::string> variant;
  bool no_rot = false;
  std::optional<double> eps_r, eps_theta;
  std::optional<int> steps;

  void add_to(CLI::App* app) {
    app->add_option("--variant", variant, "coupling variant")->check(CLI::IsMember({"cons", "ref", "disp"}, CLI::ignore_case));
    app->add_flag("--no-rot", no_rot, "drop the rotational coupling");
    app->add_option("--eps-r", eps_r, "positional penalty parameter");
    app->add_option("--eps-theta", eps_theta, "rotational penalty parameter");
    app->add_option("--steps", steps, "number of load steps")->check(CLI::PositiveNumber);
  }

  void apply(Model& m) const {
    if (variant) m.coupling.variant = variant_from_string(*variant);
    if (no_rot) m.coupling.rotational = false;
    if (eps_r) m.coupling.eps_r = *eps_r;
    if (eps_theta) m.coupling.eps_theta = *eps_theta;
    if (steps) m.solve.steps = *steps;
    validate(m);
  }
};

// a JSON file, or the name of a built-in example
Model obtain_model(const std::string& source) {
  if (fs::exists(source)) return load_model(source);
  for (const std::string& name : example_names())
    if (name == source) return example_model(name);
  std::string names;
  for (const std::string& name : example_names()) names += " " + name;
  throw ModelError("'" + source + "' is neither a file nor a built-in example (" + names.substr(1) + ")");
}

std::string step_name(const std::string& stem, int step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.%s", stem.c_str(), step, ext);
  return buf;
}

int cmd_run(const std::string& source, const Overrides& ov, const std::string& out, double load_scale) {
  Model m = obtain_model(source);
  ov.apply(m);
  fs::create_directories(out);
  const Problem p(m);
  const State ref = State::reference(m);
  write_solid_vtu((fs::path(out) / step_name("solid", 0, "vtu")).string(), m, ref);
  if (!m.beam.elements.empty())
    write_beam_vtp((fs::path(out) / step_name("beams", 0, "vtp")).string(), p, ref, std::nullopt);
  const SolveResult r = solve(p, load_scale, [&](int step, double lf, const State& s, const AssembledSystem& sys) {
    std::cerr << "step " << step << "  load factor " << lf << '\n';
    write_solid_vtu((fs::path(out) / step_name("solid", step, "vtu")).string(), m, s);
    if (!m.beam.elements.empty())
      write_beam_vtp((fs::path(out) / step_name("beams", step, "vtp")).string(), p, s, sys.mortar);
  });
  const RunSummary summary = summarize(p, r);
  const std::string text = text_report(summary);
  write_file((fs::path(out) / "report.txt").string(), text);
  write_file((fs::path(out) / "report.json").string(), json_report(summary).dump(2) + "\n");
  std::cout << text;
  return 0;
}

int cmd_verify(const std::vector<int>& criteria, const std::string& out, bool quiet) {
  const auto results = run_acceptance(criteria, quiet ? nullptr : &std::cerr);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  bool ok = true;
  for (const CriterionResult& r : results) {
    std::cout << format_result(r) << '\n';
    ok = ok && r.pass;
    nlohmann::ordered_json metrics;
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    j.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"metrics", metrics}, {"seconds", r.seconds}});
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_file((fs::path(out) / "verify.json").string(), j.dump(2) + "\n");
  }
  return ok ? 0 : 1;
}

constexpr double kAuditForceTol = 1e-11;
constexpr double kAuditMomentTol = 1e-11;
constexpr double kAuditTangentTol = 1e-5;
constexpr int kAuditTangentMaxUnknowns = 1500;

int cmd_audit(const std::string& source, const Overrides& ov, int samples, std::uint64_t seed, bool tangent) {
  bool ok = true;
  auto line = [&](bool pass, const std::string& what, double value, double tol) {
    std::printf("%s %-28s %.3e (tol %.0e)\n", pass ? "PASS" : "FAIL", what.c_str(), value, tol);
    ok = ok && pass;
  };
  if (source.empty()) {
    double force = 0.0, moment = 0.0;
    for (const ConservationSample& s : conservation_suite(samples, seed)) {
      force = std::max(force, s.cons_force_ratio);
      moment = std::max(moment, s.cons_moment_ratio);
    }
    line(force <= kAuditForceTol, "suite CONS force ratio", force, kAuditForceTol);
    line(moment <= kAuditMomentTol, "suite CONS moment ratio", moment, kAuditMomentTol);
    return ok ? 0 : 1;
  }
  Model m = obtain_model(source);
  ov.apply(m);
  const Problem p(m);
  std::mt19937_64 rng(seed);
  const State s = random_state(p, rng, 0.02, 0.2);
  const AssembledSystem sys = assemble(p, s, 1.0, true);
  if (sys.mortar) {
    const ConservationAudit a = conservation_audit(m, *p.mortar, *sys.mortar, s, sys.coupling_gradient);
    const double scale = a.lambda_norm * a.coupled_length;
    const double fr = scale > 0 ? a.force.norm() / scale : 0.0, mr = scale > 0 ? a.moment.norm() / scale : 0.0;
    line(fr <= kAuditForceTol, "coupling force ratio", fr, kAuditForceTol);
    if (m.coupling.variant == Variant::cons)
      line(mr <= kAuditMomentTol, "coupling moment ratio", mr, kAuditMomentTol);
    else
      std::printf("INFO %-28s %.3e (not conserved by %s)\n", "coupling moment ratio", mr, to_string(m.coupling.variant).c_str());
  } else {
    std::printf("INFO model has no coupling\n");
  }
  if (tangent) {
    int free = 0;
    for (char f : p.fixed) free += !f;
    if (free > kAuditTangentMaxUnknowns) {
      std::printf("SKIP tangent check: %d free unknowns (limit %d)\n", free, kAuditTangentMaxUnknowns);
    } else {
      const TangentCheck t = tangent_check(p, s, 1.0);
      line(t.max_rel_error <= kAuditTangentTol, "tangent vs finite differences", t.max_rel_error, kAuditTangentTol);
      if (t.row >= 0) std::printf("     worst entry (%s, %s)\n", p.dofs.describe(t.row).c_str(), p.dofs.describe(t.col).c_str());
    }
  }
  return ok ? 0 : 1;
}

int cmd_generate(const std::vector<std::string>& names, const std::string& out) {
  fs::create_directories(out);
  for (const std::string& name : names.empty() ? example_names() : names) {
    const fs::path path = fs::path(out) / (name + ".json");
    save_model(obtain_model(name), path.string());
    std::cout << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beam to surface coupling solver"};
  app.require_subcommand(1);

  Overrides run_ov, audit_ov;
  std::string run_model, run_out = "out";
  double load_scale = 1.0;
  CLI::App* run = app.add_subcommand("run", "solve a model and write VTK output and reports");
  run->add_option("model", run_model, "model JSON file or built-in example name")->required();
  run_ov.add_to(run);
  run->add_option("--out", run_out, "output directory");
  run->add_option("--load-scale", load_scale, "scale of the final load factor");

  std::vector<int> criteria;
  std::string verify_out;
  bool quiet = false;
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("criteria", criteria, "criterion ids (default all)")->check(CLI::Range(1, 9));
  verify->add_option("--out", verify_out, "directory for verify.json");
  verify->add_flag("-q,--quiet", quiet, "suppress progress output");

  std::string audit_model;
  int samples = 50;
  std::uint64_t seed = 20240917;
  bool no_tangent = false;
  CLI::App* audit = app.add_subcommand("audit", "conservation and tangent checks");
  audit->add_option("model", audit_model, "model JSON file or example name; omitted runs the randomized suite");
  audit_ov.add_to(audit);
  audit->add_option("--samples", samples, "randomized suite size")->check(CLI::PositiveNumber);
  audit->add_option("--seed", seed, "random seed");
  audit->add_flag("--no-tangent", no_tangent, "skip the finite difference tangent check");

  std::vector<std::string> gen_names;
  std::string gen_out = "models";
  CLI::App* generate = app.add_subcommand("generate", "write the built-in example models as JSON");
  generate->add_option("names", gen_names, "examples to write (default all)");
  generate->add_option("--out", gen_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_model, run_ov, run_out, load_scale);
    if (*verify) return cmd_verify(criteria, verify_out, quiet);
    if (*audit) return cmd_audit(audit_model, audit_ov, samples, seed, !no_tangent);
    if (*generate) return cmd_generate(gen_names, gen_out);
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
