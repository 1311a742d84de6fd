#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <string>
#include <vector>

#include "fvk/common.hpp"
#include "fvk/forms.hpp"

namespace fvk {

struct SolverConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  // Assembly roundoff floors the attainable residual norm; a step this small
  // relative to the state also declares convergence (quadratic phase reached).
  double step_tol = 1e-12;
  int max_iters = 50;
  double damping_init = 1.0;     // initial step fraction
  double backtrack_factor = 0.5; // step shrink per backtracking round
  int max_backtracks = 20;
  // When even the damped natural norm will not decrease, the full step is
  // accepted up to this many times instead of aborting.
  int max_nonmonotone_steps = 8;

  void check() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw ParameterError("SolverConfig: tolerances must be positive");
    if (max_iters < 1) throw ParameterError("SolverConfig: max_iters must be >= 1");
  }
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> residual_history;  // true residual 2-norms, iterations + 1
  std::vector<double> natural_norm_history;  // |J_k^{-1} R|, monotone along damping
  std::vector<double> step_norms;
  int nonmonotone_steps = 0;  // full steps taken without natural-norm decrease
  bool converged = false;
  std::string message;
};

/// Direct sparse LU solve. Throws LinearAlgebraError on singular pivots,
/// forwarding the factorization's pivot diagnostic.
inline Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A,
                                       const Eigen::VectorXd& b) {
  if (A.rows() != A.cols()) throw LinearAlgebraError("sparse_lu_solve: matrix not square");
  if (A.rows() != b.size()) throw LinearAlgebraError("sparse_lu_solve: size mismatch");
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw LinearAlgebraError("sparse_lu_solve: singular pivot (" + lu.lastErrorMessage() +
                             ")");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw LinearAlgebraError("sparse_lu_solve: solve failed");
  return x;
}

/// Damped Newton iteration on the coupled residual. Non-convergence and
/// singular Jacobians are reported, not thrown.
///
/// Damping backtracks on the affine-covariant natural norm |J_k^{-1} R(x)|
/// rather than |R(x)|: the raw residual norm of the coupled system rises
/// transiently along the Newton path (the Airy equation sees |grad w|^2
/// before the stress responds), while the natural norm is a faithful merit
/// function. Convergence is still declared on the true residual norm.
inline State newton_solve(const Space& space, const PlateProblem& problem,
                          const State& initial, const SolverConfig& config,
                          SolverReport* report_out = nullptr) {
  config.check();
  problem.check();
  State state = initial;
  SolverReport report;
  const int n = space.n_free();

  Eigen::VectorXd residual = assemble_residual(space, state, problem);
  double rnorm = residual.norm();
  report.residual_history.push_back(rnorm);
  const double target = std::max(config.abs_tol, config.rel_tol * rnorm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  while (rnorm > target && report.iterations < config.max_iters) {
    Eigen::SparseMatrix<double> jac = assemble_jacobian(space, state, problem);
    lu.analyzePattern(jac);
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) {
      report.message = "singular Jacobian (" + lu.lastErrorMessage() + ")";
      break;
    }
    Eigen::VectorXd step = lu.solve(-residual);
    double natural = step.norm();  // |J_k^{-1} R(x_k)|
    report.natural_norm_history.push_back(natural);

    double frac = config.damping_init;
    State trial;
    Eigen::VectorXd trial_residual;
    double trial_norm = 0.0, trial_natural = 0.0;
    int bt = 0;
    for (;; ++bt) {
      trial.v = state.v + frac * step.head(n);
      trial.w = state.w + frac * step.tail(n);
      trial_residual = assemble_residual(space, trial, problem);
      trial_norm = trial_residual.norm();
      trial_natural = lu.solve(trial_residual).norm();
      if (trial_natural < natural || bt >= config.max_backtracks) break;
      frac *= config.backtrack_factor;
    }
    if (trial_natural >= natural) {
      if (report.nonmonotone_steps >= config.max_nonmonotone_steps) {
        report.message = "backtracking exhausted without natural-norm decrease";
        break;
      }
      ++report.nonmonotone_steps;
      frac = config.damping_init;
      trial.v = state.v + frac * step.head(n);
      trial.w = state.w + frac * step.tail(n);
      trial_residual = assemble_residual(space, trial, problem);
      trial_norm = trial_residual.norm();
    }
    report.step_norms.push_back(frac * step.norm());
    state = trial;
    residual.swap(trial_residual);
    rnorm = trial_norm;
    ++report.iterations;
    report.residual_history.push_back(rnorm);
    double state_scale = std::max(1.0, std::max(state.v.norm(), state.w.norm()));
    if (frac * step.norm() <= config.step_tol * state_scale) {
      report.message = "converged on step tolerance";
      break;
    }
  }

  report.converged =
      rnorm <= target || report.message == "converged on step tolerance";
  if (!report.converged && report.message.empty())
    report.message = "iteration cap exceeded";
  if (report_out) *report_out = report;
  return state;
}

enum class RampParameter { Gamma, Beta };

struct ContinuationReport {
  std::vector<SolverReport> steps;
  bool converged = false;
  int failed_step = -1;  // first non-converged ramp index, -1 if none
};

/// Parameter continuation: solve at each ramp value, warm-starting from the
/// previous converged state. On failure returns the last converged state.
inline State continuation_solve(const Space& space, PlateProblem problem,
                                RampParameter param, const std::vector<double>& ramp,
                                const SolverConfig& config,
                                ContinuationReport* report_out = nullptr) {
  if (ramp.empty()) throw ParameterError("continuation_solve: empty ramp");
  ContinuationReport creport;
  State state = State::zero(space);
  State last_good = state;
  creport.converged = true;
  for (std::size_t k = 0; k < ramp.size(); ++k) {
    if (param == RampParameter::Gamma)
      problem.gamma = ramp[k];
    else
      problem.beta = ramp[k];
    SolverReport rep;
    state = newton_solve(space, problem, state, config, &rep);
    creport.steps.push_back(rep);
    if (!rep.converged) {
      creport.converged = false;
      creport.failed_step = static_cast<int>(k);
      state = last_good;
      break;
    }
    last_good = state;
  }
  if (report_out) *report_out = creport;
  return state;
}

}  // namespace fvk
