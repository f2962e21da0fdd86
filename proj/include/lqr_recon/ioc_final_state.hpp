#pragma once

// Inverse problem for the final-state-only objective: recover R (with H = I)
// from trajectory fragments by fitting the PMP-constrained rollout.

#include <string>
#include <vector>

#include "lqr_recon/model.hpp"

namespace lqr_recon {

/// Optimality conditions of one horizon-N problem collected as
/// F(R) Z = A_tilde x_0 with Z = [x_1; lambda_1; ...; x_N; lambda_N].
/// Rows: x_{i+1} - A x_i + B R^{-1} B' lambda_{i+1} = 0 (i = 0..N-1, the
/// i = 0 block carries A x_0 on the right), lambda_i - A' lambda_{i+1} = 0
/// (i = 1..N-1) and lambda_N - H x_N = 0.
struct PmpStackedSystem {
  int horizon = 0;
  MatrixXd F;        // 2nN x 2nN
  MatrixXd A_tilde;  // 2nN x n
  MatrixXd G_X;      // nN x 2nN, picks x_1..x_N out of Z

  /// Solves for Z given x_0.
  VectorXd solve(const VectorXd& x0) const;
};

PmpStackedSystem build_pmp_system(const LinearSystem& sys, const MatrixXd& h, const MatrixXd& r,
                                  int horizon);

/// (1/M) sum_j sum_{i=1..N_j} ||y_i^j - C (x_i^j + x_T)||^2 with the states
/// given by the PMP system of horizon N_j = l_j from x_0^j = C^{-1}y_0^j - x_T.
/// Data are world-frame outputs. Throws kDomain unless R is PD.
double pmp_residual(const LinearSystem& sys, const MatrixXd& r, const TrajectorySet& data,
                    const VectorXd& target);

struct Problem1Options {
  /// Starting points; empty means the single start R_0 = I.
  std::vector<MatrixXd> starts;
  int max_iterations = 500;
  double gradient_tolerance = 1e-10;
  double fd_step = 1e-6;  // relative central-difference step
};

/// R_0 = I followed by count - 1 rescaled identities (0.2 I, 5 I, ...).
std::vector<MatrixXd> default_problem1_starts(int input_dim, int count);

struct Problem1Result {
  MatrixXd R;
  double residual = 0.0;
  int iterations = 0;       // of the winning start
  int starts_tried = 0;
  bool converged = false;  // gradient or step tolerance reached
  std::string message;
};

/// Adaptive-damping Gauss-Newton over R = L L' + 1e-8 I with a central
/// finite-difference Jacobian of the stacked residual; best start wins.
/// Non-convergence is reported in the result, not thrown.
Problem1Result solve_problem1(const LinearSystem& sys, const TrajectorySet& data,
                              const VectorXd& target, const Problem1Options& options = {});

}  // namespace lqr_recon
