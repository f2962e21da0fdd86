#include "lqr_recon/pipeline.hpp"

#include <algorithm>

#include "lqr_recon/horizon.hpp"
#include "lqr_recon/ioc_final_state.hpp"
#include "lqr_recon/linalg.hpp"
#include "lqr_recon/lqr_forward.hpp"
#include "lqr_recon/predict.hpp"

namespace lqr_recon {

namespace {

// Clips negative eigenvalues; returns whether anything changed.
bool project_psd(MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(linalg::symmetrize(m));
  if (es.eigenvalues().minCoeff() >= 0.0) {
    m = linalg::symmetrize(m);
    return false;
  }
  const VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  m = linalg::symmetrize(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose());
  return true;
}

class StageRunner {
 public:
  explicit StageRunner(ReconstructionReport& rep) : rep_(rep) {}

  // Runs fn; on an Error records the stage and returns false.
  template <typename Fn>
  bool run(const char* stage, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      rep_.failed_stage = stage;
      rep_.error_code = e.code();
      rep_.error_message = e.what();
      return false;
    }
    rep_.completed_stages.emplace_back(stage);
    return true;
  }

 private:
  ReconstructionReport& rep_;
};

}  // namespace

ReconstructionReport run_pipeline(const TrajectorySet& history, const Trajectory& current,
                                  const LinearSystem& sys, const PipelineOptions& options) {
  ReconstructionReport rep;
  rep.setting = options.setting;
  rep.theta = options.theta;
  StageRunner stages(rep);
  const int n = sys.state_dim();

  if (!stages.run("validation", [&] {
        sys.check_dimensions();
        const ValidationReport v = validate_system(sys);
        if (!v.passed()) fail(ErrorCode::kPrecondition, "system invalid: " + v.failures.front());
        require(current.length() >= 1, ErrorCode::kPrecondition,
                "current trajectory needs at least two observations");
      })) {
    return rep;
  }

  if (!stages.run("target", [&] {
        if (options.known_target) {
          rep.target_method = "known";
          rep.target = *options.known_target;
          require(rep.target.size() == n, ErrorCode::kStructural, "known target must be an n-vector");
          return;
        }
        const TrajectorySet* source = &history;
        TargetMethod method = TargetMethod::kLineIntersection;
        if (options.target_method) {
          method = *options.target_method;
          if (method == TargetMethod::kLineIntersection && !options.target_probes.empty()) {
            source = &options.target_probes;
          }
        } else if (!options.target_probes.empty()) {
          source = &options.target_probes;
        } else if (!history.empty() && history.all_contain_final_state()) {
          method = TargetMethod::kFinalStateAverage;
        }
        const TargetEstimate est = estimate_target(sys, *source, method, options.target_options);
        rep.target_method = to_string(method);
        rep.target = est.target;
        rep.target_gap = est.gap;
      })) {
    return rep;
  }

  LQRObjective objective;
  if (options.known_objective) {
    if (!stages.run("weights", [&] {
          objective = *options.known_objective;
          objective.check(n, sys.input_dim());
          rep.weights_method = "known";
        })) {
      return rep;
    }
  } else if (options.setting == Setting::kFinalStateOnly) {
    if (!stages.run("weights", [&] {
          Problem1Options p1;
          p1.starts = default_problem1_starts(sys.input_dim(), std::max(1, options.problem1_starts));
          const Problem1Result res = solve_problem1(sys, history, rep.target, p1);
          rep.problem1_residual = res.residual;
          rep.problem1_iterations = res.iterations;
          rep.problem1_converged = res.converged;
          rep.problem1_message = res.message;
          objective = LQRObjective::final_state_only(res.R, n);
          objective.check(n, sys.input_dim());
          rep.weights_method = "problem1";
          rep.scale_note = "H fixed to the identity";
        })) {
      return rep;
    }
  } else {
    GainEstimate gains;
    if (!stages.run("gain-estimation", [&] {
          require(!history.empty(), ErrorCode::kPrecondition, "no history trajectories");
          rep.gain_suffix = options.gain_suffix > 0 ? options.gain_suffix : history.min_length();
          gains = estimate_gain_sequence(sys, history.shifted(sys.C, rep.target), rep.gain_suffix);
          rep.estimated_gains = gains.gains.gains;
          rep.gain_gram_min_sv = gains.gram_min_sv;
        })) {
      return rep;
    }
    StackedIdentificationSystem stacked;
    if (!stages.run("feasibility", [&] {
          const int t_win = std::min(options.window, gains.gains.horizon());
          require(t_win >= 1, ErrorCode::kPrecondition, "window T must be >= 1");
          const std::vector<MatrixXd> tail(gains.gains.gains.end() - t_win, gains.gains.gains.end());
          stacked = build_stacked_system(build_lemma4(sys, tail));
          rep.feasibility = feasibility_test(stacked);
          rep.identifiability =
              check_identifiability(sys, gains.gains, options.diagonal_identifiability);
        })) {
      return rep;
    }
    if (!stages.run("weights", [&] {
          Problem2Result res;
          if (rep.feasibility->decision == Feasibility::kExactFeasible) {
            try {
              res = solve_problem2(stacked, Problem2Mode::kExactNullspace);
            } catch (const Error& e) {
              if (e.code() != ErrorCode::kAmbiguous) throw;
              rep.weights_note = std::string(e.what()) + "; picked its best-conditioned member";
              res = solve_problem2(stacked, Problem2Mode::kMinCondition);
            }
          } else {
            res = solve_problem2(stacked, Problem2Mode::kQpFallback);
            if (res.null_dim > 1) {
              rep.weights_note = "near-null cluster of dimension " + std::to_string(res.null_dim) +
                                 "; picked its best-conditioned member";
            }
          }
          if (project_psd(res.Q)) {
            if (!rep.weights_note.empty()) rep.weights_note += "; ";
            rep.weights_note += "negative eigenvalues of Q clipped to zero";
          }
          rep.weights_method = to_string(res.mode);
          rep.tau = res.tau;
          rep.scale_note = res.scale_note;
          objective = LQRObjective::classic(res.H, res.Q, res.R);
          objective.check(n, sys.input_dim());
        })) {
      return rep;
    }
  }
  rep.H = objective.H;
  rep.Q = objective.Q;
  rep.R = objective.R;
  if (options.reference_objective) {
    const auto& ref = *options.reference_objective;
    double alpha = 0.0;
    scale_matched_error(rep.H, rep.Q, rep.R, ref.H, ref.Q, ref.R, &alpha);
    rep.alpha = alpha;
  }

  rep.observed_steps = current.length();
  if (!stages.run("horizon", [&] {
        if (options.known_horizon) {
          rep.n_star = *options.known_horizon;
          require(rep.n_star > rep.observed_steps, ErrorCode::kPrecondition,
                  "known horizon must exceed the observed steps");
          return;
        }
        HorizonProblem hp{sys, objective, current, rep.target};
        const HorizonSearchTrace trace = binary_search_horizon(hp, options.theta, options.horizon_cap);
        rep.n_star = trace.result;
        rep.horizon_bounds = trace.bounds;
        rep.horizon_evaluations = trace.evaluated;
      })) {
    return rep;
  }

  RiccatiTrace full;
  if (!stages.run("kalman", [&] {
        full = riccati_gains(sys, objective, rep.n_star);
        const KalmanResult kf =
            kalman_state(sys, full.gains.gains, shifted(current, sys.C, rep.target));
        rep.current_state = kf.state + rep.target;
        rep.current_covariance = kf.covariance;
      })) {
    return rep;
  }

  LQRProblemSpec sub;
  if (!stages.run("reconstruction", [&] {
        sub = reconstruct_problem(sys, objective, rep.target, rep.n_star, rep.observed_steps,
                                  rep.current_state);
        rep.remaining_horizon = sub.horizon;
        rep.gains = full.gains;
      })) {
    return rep;
  }

  stages.run("prediction", [&] {
    rep.mu0 = predict_input(sub);
    rep.forecast = predict_states(sub);
  });
  return rep;
}

}  // namespace lqr_recon
