#include "beamtie/solver.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include <Eigen/SparseLU>

#include "beamtie/error.hpp"

namespace beamtie {

Eigen::VectorXd solve_free(const Problem& p, const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(b.size());
  std::vector<int> free_index(n, -1), free_dofs;
  for (int i = 0; i < n; ++i)
    if (!p.fixed[i]) {
      free_index[i] = static_cast<int>(free_dofs.size());
      free_dofs.push_back(i);
    }
  const int nf = static_cast<int>(free_dofs.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      const int r = free_index[it.row()], c = free_index[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  Eigen::SparseMatrix<double> Kf(nf, nf);
  Kf.setFromTriplets(trip.begin(), trip.end());
  Kf.makeCompressed();
  Eigen::VectorXd bf(nf);
  for (int i = 0; i < nf; ++i) bf[i] = b[free_dofs[i]];

  auto singular = [&](const std::string& detail) {
    // an empty column is the clearest culprit; fall back to the solver's report
    for (int c = 0; c < nf; ++c) {
      double norm = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(Kf, c); it; ++it) norm += std::abs(it.value());
      if (norm == 0.0)
        throw SingularMatrix("singular matrix: zero pivot at " + p.dofs.describe(free_dofs[c]));
    }
    std::smatch m;
    if (std::regex_search(detail, m, std::regex("(\\d+)"))) {
      const int c = std::stoi(m[1]);
      if (c >= 0 && c < nf)
        throw SingularMatrix("singular matrix: zero pivot near " + p.dofs.describe(free_dofs[c]) + " (" + detail + ")");
    }
    throw SingularMatrix("singular matrix: " + detail);
  };

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(Kf);
  lu.factorize(Kf);
  if (lu.info() != Eigen::Success) singular(lu.lastErrorMessage());
  const Eigen::VectorXd xf = lu.solve(bf);
  if (lu.info() != Eigen::Success || !xf.allFinite()) singular("solve failed");
  // rank deficiency that survives pivoting shows up as an exploding solution
  double kmax = 0.0;
  for (int c = 0; c < nf; ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Kf, c); it; ++it) kmax = std::max(kmax, std::abs(it.value()));
  Eigen::Index worst = 0;
  const double xmax = nf ? xf.cwiseAbs().maxCoeff(&worst) : 0.0;
  if (kmax * xmax > 1e14 * bf.cwiseAbs().maxCoeff())
    throw SingularMatrix("singular matrix: numerically rank deficient, largest correction at " +
                         p.dofs.describe(free_dofs[worst]) + "; check the supports");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nf; ++i) x[free_dofs[i]] = xf[i];
  return x;
}

SolveResult solve(const Problem& p, double load_scale, const StepCallback& on_step) {
  const SolveConfig& cfg = p.model->solve;
  SolveResult out;
  out.state = State::reference(*p.model);
  for (int step = 1; step <= cfg.steps; ++step) {
    const double lf = load_scale * step / cfg.steps;
    double first = -1.0;
    bool converged = false;
    for (int it = 0; it <= cfg.max_iterations; ++it) {
      AssembledSystem sys = assemble(p, out.state, lf, true);
      const double norm = free_norm(p, sys.residual);
      out.history.push_back({step, it, norm});
      if (first < 0.0) first = norm;
      if (!std::isfinite(norm)) break;
      if (norm <= std::max(cfg.rel_tol * first, cfg.abs_tol)) {
        converged = true;
        out.final_system = std::move(sys);
        break;
      }
      if (it == cfg.max_iterations) break;
      out.state.update(p.dofs, solve_free(p, sys.tangent, -sys.residual));
    }
    if (!converged) {
      std::ostringstream os;
      os << "nonconvergence in load step " << step << " of " << cfg.steps << "; residual norms:";
      for (const auto& r : out.history)
        if (r.step == step) os << " [" << r.iteration << "] " << r.residual_norm;
      os << "; try more load steps";
      throw NonConvergence(os.str());
    }
    out.load_factor = lf;
    if (on_step) on_step(step, lf, out.state, out.final_system);
  }
  return out;
}

bool quadratic_tail(const std::vector<double>& r) {
  const size_t n = r.size();
  if (n < 3) return false;
  const double a = r[n - 3], b = r[n - 2], c = r[n - 1];
  if (!(a > 0.0) || !(b > 0.0)) return false;
  return c / b <= 1e-3 && c <= 10.0 * b * b / a;
}

}  // namespace beamtie
