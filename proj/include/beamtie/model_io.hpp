#pragma once

// JSON model files, VTK export and run reports.

#include <optional>
#include <string>

#include <json.hpp>

#include "beamtie/model.hpp"
#include "beamtie/solver.hpp"

namespace beamtie {

/// Parses and validates a model; schema problems raise ModelError prefixed
/// with the JSON path of the offending value, e.g. "$.beam.nodes[3].tangent".
Model model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Model& m);

Model load_model(const std::string& path);
void save_model(const Model& m, const std::string& path);

/// Compares two models field by field; coordinates and triads to `tol`.
bool models_equivalent(const Model& a, const Model& b, double tol, std::string* why = nullptr);

/// Fixed 17-significant-digit rendering used by every exporter.
std::string format_number(double v);

/// Solid mesh in reference coordinates with point arrays "displacement" and "S33".
void write_solid_vtu(const std::string& path, const Model& m, const State& s);

/// Beam polylines, `samples` points per element. Point arrays: "displacement",
/// "curvature" (bending part of the curvature change) and "lambda" (interpolated
/// positional multipliers, the negative of the coupling line load on the beam;
/// zero when uncoupled). Cell array "curvature_mid" holds the curvature at the
/// element middle.
void write_beam_vtp(const std::string& path, const Problem& p, const State& s,
                    const std::optional<MortarData>& mortar, int samples = 5);

struct RunSummary {
  std::string model;
  std::string variant;
  bool rotational = true;
  double eps_r = 0.0, eps_theta = 0.0;
  int steps = 0;
  double load_factor = 0.0;
  Energies energy;
  double max_solid_displacement = 0.0;
  double max_s33 = 0.0;
  std::vector<Vec3> beam_tip_displacement;  // last node of each beam
  Vec3 mean_beam_displacement = Vec3::Zero();
  double constraint_inf = 0.0;
  double rotational_constraint_inf = 0.0;
  bool coupled = false;
  ConservationAudit audit;
  std::vector<IterationRecord> history;
};

RunSummary summarize(const Problem& p, const SolveResult& r);
std::string text_report(const RunSummary& s);
nlohmann::ordered_json json_report(const RunSummary& s);

/// Writes `content` to `path`, raising Error on I/O failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace beamtie
