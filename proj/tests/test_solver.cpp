#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

#include "fvk/analytic.hpp"
#include "fvk/forms.hpp"
#include "fvk/mesh.hpp"
#include "fvk/post.hpp"
#include "fvk/solver.hpp"

using namespace fvk;

TEST(SparseLu, IdentityAndHandSolve) {
  Eigen::SparseMatrix<double> eye(4, 4);
  eye.setIdentity();
  Eigen::VectorXd b(4);
  b << 1, -2, 3, 0.5;
  EXPECT_NEAR((sparse_lu_solve(eye, b) - b).norm(), 0.0, 1e-14);

  Eigen::SparseMatrix<double> A(2, 2);
  std::vector<Eigen::Triplet<double>> trip = {{0, 0, 2.0}, {0, 1, 1.0},
                                              {1, 0, 1.0}, {1, 1, 3.0}};
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(2);
  rhs << 3, 4;
  Eigen::VectorXd x = sparse_lu_solve(A, rhs);
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 1.0, 1e-14);
}

TEST(SparseLu, SingularPivotReported) {
  Eigen::SparseMatrix<double> A(2, 2);
  std::vector<Eigen::Triplet<double>> trip = {{0, 0, 1.0}, {1, 0, 1.0}};
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd b(2);
  b << 1, 1;
  EXPECT_THROW(sparse_lu_solve(A, b), LinearAlgebraError);
}

TEST(SparseLu, MatchesDenseOracleOnBiharmonicSystem) {
  Space space(generate_disc_mesh(0.1));
  Eigen::SparseMatrix<double> A = assemble_biharmonic_dg(space, 300.0);
  ExactSolution test2 = test2_exact(100.0, Vec2(0.2, 0.0));
  Eigen::VectorXd b = assemble_dirac_load(space, test2.disclinations, 100.0);
  Eigen::VectorXd x = sparse_lu_solve(A, b);

  Eigen::MatrixXd dense(A);
  Eigen::VectorXd x_dense = Eigen::PartialPivLU<Eigen::MatrixXd>(dense).solve(b);
  EXPECT_LE((x - x_dense).cwiseAbs().maxCoeff(), 1e-8 * x.cwiseAbs().maxCoeff());

  EXPECT_LE((A * x - b).norm(), 1e-10 * (x.norm() + b.norm()) * A.coeffs().abs().maxCoeff());
}

TEST(SparseLu, AgreesWithSymmetricSolverOnSpdSystems) {
  std::mt19937 rng(19);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 80;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = gauss(rng);
  Eigen::MatrixXd spd = M * M.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  Eigen::SparseMatrix<double> A = spd.sparseView();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = gauss(rng);
  Eigen::VectorXd x_lu = sparse_lu_solve(A, b);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
  Eigen::VectorXd x_llt = llt.solve(b);
  EXPECT_LE((x_lu - x_llt).norm(), 1e-9 * x_lu.norm());
}

TEST(Newton, ZeroProblemConvergesImmediately) {
  Space space(generate_disc_mesh(0.3));
  PlateProblem quiet(1.0, 0.0, 0.15);
  SolverConfig config;
  SolverReport report;
  State sol = newton_solve(space, quiet, State::zero(space), config, &report);
  EXPECT_TRUE(report.converged);
  EXPECT_LE(report.iterations, 1);
  EXPECT_EQ(sol.v.norm(), 0.0);
  EXPECT_EQ(sol.w.norm(), 0.0);
  EXPECT_EQ(report.residual_history.size(), static_cast<std::size_t>(report.iterations + 1));
}

TEST(Newton, Test2MembraneBranchKeepsDeflectionZero) {
  // Pure membrane configuration: w = 0 is an exact discrete branch.
  Space space(generate_disc_mesh(0.15));
  double beta = 100.0;
  ExactSolution test2 = test2_exact(beta, Vec2(0.2, 0.0));
  PlateProblem pb(beta, 0.0, 0.15);
  pb.disclinations = test2.disclinations;
  SolverConfig config;
  SolverReport report;
  State sol = newton_solve(space, pb, State::zero(space), config, &report);
  EXPECT_TRUE(report.converged) << report.message;
  double vmax = sol.v.cwiseAbs().maxCoeff();
  EXPECT_GT(vmax, 1.0);
  EXPECT_LE(sol.w.cwiseAbs().maxCoeff(), 1e-8 * vmax);
}

TEST(Newton, Test1QuadraticConvergence) {
  Space space(generate_disc_mesh(0.1));
  ExactSolution test1 = test1_exact(0.15);
  PlateProblem pb(100.0, 1e-8, 0.15);  // gamma beta^4 = 1
  pb.load = test1.p;
  SolverConfig config;
  config.abs_tol = 1e-11;
  SolverReport report;
  State sol = newton_solve(space, pb, State::zero(space), config, &report);
  EXPECT_TRUE(report.converged) << report.message;
  ASSERT_GE(report.residual_history.size(), 4u);

  // The damping monitor (natural norm |J_k^{-1} R|) decreases monotonically;
  // the raw residual may rise transiently while the Airy field catches up.
  for (std::size_t k = 1; k < report.natural_norm_history.size(); ++k)
    EXPECT_LT(report.natural_norm_history[k], report.natural_norm_history[k - 1]);

  // Quadratic convergence near the root: after stripping the trailing
  // roundoff plateau, the final three log-residuals have a negative second
  // difference.
  std::vector<double> hist = report.residual_history;
  while (hist.size() >= 2 && hist.back() > 0.5 * hist[hist.size() - 2])
    hist.pop_back();
  ASSERT_GE(hist.size(), 3u);
  std::size_t m = hist.size();
  double d2 = (std::log10(hist[m - 1]) - std::log10(hist[m - 2])) -
              (std::log10(hist[m - 2]) - std::log10(hist[m - 3]));
  EXPECT_LT(d2, 0.0);

  // Functional decreases from the flat start for this loaded problem.
  EXPECT_LT(evaluate_functional(space, sol, pb),
            evaluate_functional(space, State::zero(space), pb));
}

TEST(Continuation, SingleStepMatchesNewton) {
  Space space(generate_disc_mesh(0.2));
  ExactSolution test1 = test1_exact(0.15);
  PlateProblem pb(10.0, 1e-4, 0.15);  // gamma beta^4 = 1
  pb.load = test1.p;
  SolverConfig config;
  SolverReport newton_report;
  State direct = newton_solve(space, pb, State::zero(space), config, &newton_report);
  ContinuationReport creport;
  State ramped = continuation_solve(space, pb, RampParameter::Gamma, {1e-4}, config,
                                    &creport);
  EXPECT_TRUE(creport.converged);
  EXPECT_EQ((ramped.v - direct.v).norm(), 0.0);
  EXPECT_EQ((ramped.w - direct.w).norm(), 0.0);
}

TEST(Continuation, GammaRampReachesNonlinearRegime) {
  // Ramp to the folding-side load at beta = 20; the coupling energy must
  // leave the quadratic-in-gamma regime by more than 10%.
  Space space(generate_disc_mesh(0.12));
  PlateProblem pb(20.0, 0.0, 0.15);
  pb.load = [](const Vec2&) { return -1.0; };
  pb.disclinations.positions = {Vec2(0.0, 0.0)};
  pb.disclinations.angles = {-1.0};
  SolverConfig config;

  // Quadratic reference from two small-gamma solves.
  double g_small = 6.25e-7, g_mid = 6.25e-6;
  SolverReport rep;
  PlateProblem pa = pb;
  pa.gamma = g_small;
  State sa = newton_solve(space, pa, State::zero(space), config, &rep);
  ASSERT_TRUE(rep.converged);
  double ec_small = std::abs(compute_energies(space, sa, pa).coupling);
  PlateProblem pm = pb;
  pm.gamma = g_mid;
  State sm = newton_solve(space, pm, State::zero(space), config, &rep);
  ASSERT_TRUE(rep.converged);
  double ec_mid = std::abs(compute_energies(space, sm, pm).coupling);
  // Sanity: quadratic scaling between the two small gammas.
  EXPECT_NEAR(ec_mid / ec_small, 100.0, 5.0);

  std::vector<double> ramp = {6.25e-7, 1e-4, 2e-3, 8e-3, 1.875e-2};
  ContinuationReport creport;
  State final = continuation_solve(space, pb, RampParameter::Gamma, ramp, config,
                                   &creport);
  ASSERT_TRUE(creport.converged) << "failed at ramp step " << creport.failed_step;
  PlateProblem pf = pb;
  pf.gamma = ramp.back();
  double ec_final = std::abs(compute_energies(space, final, pf).coupling);
  double extrapolated = ec_small * std::pow(ramp.back() / g_small, 2);
  EXPECT_GT(std::abs(ec_final - extrapolated), 0.10 * extrapolated);
}

TEST(Continuation, RoundTripPathIndependenceAtSmallGamma) {
  Space space(generate_disc_mesh(0.2));
  PlateProblem pb(20.0, 0.0, 0.15);
  pb.load = [](const Vec2&) { return -1.0; };
  pb.disclinations.positions = {Vec2(0.0, 0.0)};
  pb.disclinations.angles = {-1.0};
  SolverConfig config;

  std::vector<double> forward = {2e-7, 5e-7, 1e-6};
  State a = continuation_solve(space, pb, RampParameter::Gamma, forward, config);
  std::vector<double> round_trip = {2e-7, 5e-7, 1e-6, 5e-7, 2e-7, 5e-7, 1e-6};
  State b = continuation_solve(space, pb, RampParameter::Gamma, round_trip, config);

  PlateProblem pf = pb;
  pf.gamma = 1e-6;
  double ea = evaluate_functional(space, a, pf);
  double eb = evaluate_functional(space, b, pf);
  EXPECT_NEAR(ea, eb, 1e-6 * (1.0 + std::abs(ea)));
}

TEST(SolverConfig, Validation) {
  SolverConfig bad;
  bad.abs_tol = 0.0;
  EXPECT_THROW(bad.check(), ParameterError);
  bad = SolverConfig{};
  bad.max_iters = 0;
  EXPECT_THROW(bad.check(), ParameterError);
  EXPECT_THROW(continuation_solve(Space(generate_disc_mesh(0.5)), PlateProblem{},
                                  RampParameter::Gamma, {}, SolverConfig{}),
               ParameterError);
}
