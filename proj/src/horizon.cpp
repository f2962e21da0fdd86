#include "lqr_recon/horizon.hpp"

#include <algorithm>
#include <string>

#include "lqr_recon/error.hpp"

namespace lqr_recon {

HorizonEvaluator::HorizonEvaluator(HorizonProblem problem)
    : problem_(std::move(problem)), cache_(problem_.system, problem_.objective) {
  const auto& sys = problem_.system;
  sys.check_dimensions();
  problem_.objective.check(sys.state_dim(), sys.input_dim());
  require(problem_.observed.length() >= 1, ErrorCode::kPrecondition,
          "horizon estimation needs at least two observations");
  require(problem_.target.size() == sys.state_dim(), ErrorCode::kStructural,
          "target must be an n-vector");
  x0_ = sys.C.fullPivLu().solve(problem_.observed.outputs.front()) - problem_.target;
  const VectorXd offset = sys.C * problem_.target;
  for (const auto& y : problem_.observed.outputs) residual_targets_.push_back(y - offset);
}

double HorizonEvaluator::jn(int n_hat) {
  const int l = problem_.observed_steps();
  require(n_hat > l, ErrorCode::kPrecondition,
          "candidate horizon " + std::to_string(n_hat) + " must exceed l = " + std::to_string(l));
  if (auto it = memo_.find(n_hat); it != memo_.end()) return it->second;
  const auto& sys = problem_.system;
  VectorXd x = x0_;
  double sum = 0.0;
  for (int k = 0; k < l; ++k) {
    x = sys.A * x - sys.B * (cache_.gain(n_hat - k) * x);
    sum += (residual_targets_[k + 1] - sys.C * x).squaredNorm();
  }
  memo_.emplace(n_hat, sum);
  return sum;
}

double HorizonEvaluator::gradient(int n_hat) { return jn(n_hat + 1) - jn(n_hat); }

double evaluate_jn(const HorizonProblem& problem, int n_hat) {
  HorizonEvaluator eval(problem);
  return eval.jn(n_hat);
}

double approx_gradient(HorizonEvaluator& eval, int n_hat) { return eval.gradient(n_hat); }

HorizonSearchTrace binary_search_horizon(const HorizonProblem& problem, int theta, int cap) {
  require(theta >= 1, ErrorCode::kPrecondition, "theta must be >= 1");
  HorizonEvaluator eval(problem);
  const int l = problem.observed_steps();
  HorizonSearchTrace trace;

  int lower = l + 1;
  int probe = l + theta;
  while (eval.gradient(probe) < 0.0) {
    probe += theta;
    ++trace.bracket_expansions;
    if (probe > cap) {
      fail(ErrorCode::kSearchFailed,
           "J_N still decreasing at N = " + std::to_string(probe) + " (cap " +
               std::to_string(cap) + ")");
    }
  }
  // The last probe with a negative slope bounds the minimizer from below.
  if (trace.bracket_expansions > 0) lower = probe - theta;
  int upper = std::max(probe, lower + 1);
  trace.bracket_evaluations = eval.evaluations();
  trace.bounds.emplace_back(lower, upper);

  while (upper - lower > 1) {
    const int mid = (lower + upper) / 2;
    if (eval.gradient(mid) > 0.0) {
      upper = mid;
    } else {
      lower = mid;
    }
    trace.bounds.emplace_back(lower, upper);
  }
  const double j_lo = eval.jn(lower);
  const double j_hi = eval.jn(upper);
  trace.result = j_hi < j_lo ? upper : lower;
  trace.evaluated = eval.evaluated();
  trace.total_evaluations = eval.evaluations();
  return trace;
}

int exhaustive_horizon(const HorizonProblem& problem, int n_max, std::vector<double>* values) {
  const int l = problem.observed_steps();
  require(n_max > l, ErrorCode::kPrecondition, "n_max must exceed l");
  HorizonEvaluator eval(problem);
  int best = l + 1;
  double best_j = eval.jn(best);
  if (values) values->assign(1, best_j);
  for (int n = l + 2; n <= n_max; ++n) {
    const double j = eval.jn(n);
    if (values) values->push_back(j);
    if (j < best_j) {
      best_j = j;
      best = n;
    }
  }
  return best;
}

}  // namespace lqr_recon
