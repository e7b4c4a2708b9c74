#pragma once

// Load-stepped Newton–Raphson on the condensed system.

#include <functional>
#include <vector>

#include "beamtie/assembly.hpp"

namespace beamtie {

struct IterationRecord {
  int step = 0;
  int iteration = 0;
  double residual_norm = 0.0;
};

struct SolveResult {
  State state;
  std::vector<IterationRecord> history;
  AssembledSystem final_system;  // at the converged state of the last step
  double load_factor = 1.0;
};

/// Called after every converged load step.
using StepCallback = std::function<void(int step, double load_factor, const State&, const AssembledSystem&)>;

/// Solves the problem with the model's solver settings; load factor scale multiplies all loads.
SolveResult solve(const Problem& p, double load_scale = 1.0, const StepCallback& on_step = {});

/// Solves K_ff x = b over the free unknowns; throws SingularMatrix naming a
/// suspicious unknown.
Eigen::VectorXd solve_free(const Problem& p, const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b);

/// Asymptotic convergence check on the residual history of one load step:
/// the last ratio r_k / r_{k−1} is at most 1e-3, and r_k ≤ 10 r_{k−1}² / r_{k−2}.
bool quadratic_tail(const std::vector<double>& norms);

}  // namespace beamtie
