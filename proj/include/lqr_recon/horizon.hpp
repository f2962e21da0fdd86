#pragma once

// Control-horizon estimation: the rollout-mismatch objective J_N, its
// forward-difference slope, the bracketing/bisection search and an
// exhaustive scan used as its oracle.

#include <map>
#include <utility>
#include <vector>

#include "lqr_recon/lqr_forward.hpp"
#include "lqr_recon/model.hpp"

namespace lqr_recon {

/// Everything J_N depends on besides the candidate horizon. `observed` is
/// y_0..y_l in the world frame.
struct HorizonProblem {
  LinearSystem system;
  LQRObjective objective;
  Trajectory observed;
  VectorXd target;

  int observed_steps() const { return observed.length(); }
};

/// sum_{i=1..l} ||y_i - C (x_i + x_T)||^2 for the closed loop of horizon
/// n_hat started at x_0 = C^{-1} y_0 - x_T. Requires n_hat > l.
double evaluate_jn(const HorizonProblem& problem, int n_hat);

/// Memoizing evaluator shared by the search routines. Gains are taken from
/// one steps-to-go cache, so candidates of any size cost one backward pass
/// in total.
class HorizonEvaluator {
 public:
  explicit HorizonEvaluator(HorizonProblem problem);

  double jn(int n_hat);
  /// J_N(n_hat + 1) - J_N(n_hat).
  double gradient(int n_hat);

  const HorizonProblem& problem() const { return problem_; }
  const std::map<int, double>& evaluated() const { return memo_; }
  /// Number of distinct J_N computations so far.
  int evaluations() const { return static_cast<int>(memo_.size()); }

 private:
  HorizonProblem problem_;
  RiccatiCache cache_;
  VectorXd x0_;
  std::vector<VectorXd> residual_targets_;  // y_i - C x_T
  std::map<int, double> memo_;
};

double approx_gradient(HorizonEvaluator& eval, int n_hat);

struct HorizonSearchTrace {
  std::map<int, double> evaluated;
  std::vector<std::pair<int, int>> bounds;  // (N-, N+) after bracketing and each bisection
  int result = 0;
  int bracket_evaluations = 0;  // distinct J_N values computed while bracketing
  int bracket_expansions = 0;
  int total_evaluations = 0;
};

/// Bracketing from N' = l + theta in steps of theta while the slope is
/// negative, then bisection on the sign of the slope at the midpoint.
/// Returns the smaller-J end of the final bracket, ties to the smaller N.
/// Throws kSearchFailed if the bracket passes `cap` without the slope
/// turning non-negative.
HorizonSearchTrace binary_search_horizon(const HorizonProblem& problem, int theta,
                                         int cap = 1000000);

/// argmin of J_N over l < N <= n_max, ties to the smaller N.
int exhaustive_horizon(const HorizonProblem& problem, int n_max,
                       std::vector<double>* values = nullptr);

}  // namespace lqr_recon
