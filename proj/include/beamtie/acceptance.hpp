#pragma once

// Acceptance criteria 1–9 with pinned tolerances.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace beamtie {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0.0;
};

/// Runs the requested criteria (all when empty). Progress lines go to `log` if given.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& criteria, std::ostream* log = nullptr);

/// One line per criterion: "PASS <id> <title> | key=value ...".
std::string format_result(const CriterionResult& r);

}  // namespace beamtie
