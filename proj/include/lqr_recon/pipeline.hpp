#pragma once

// End-to-end reconstruction: target, weights, horizon, current state,
// reconstructed subproblem and prediction.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqr_recon/error.hpp"
#include "lqr_recon/estimation.hpp"
#include "lqr_recon/ioc_classic.hpp"
#include "lqr_recon/model.hpp"

namespace lqr_recon {

inline constexpr int kReportSchemaVersion = 1;

struct PipelineOptions {
  Setting setting = Setting::kClassic;
  /// Unset: line intersection on `target_probes` when given, else the
  /// final-state average when every history trajectory is flagged, else
  /// line intersection on the history.
  std::optional<TargetMethod> target_method;
  TargetOptions target_options;
  /// Probe trajectories for the line fit (world frame).
  TrajectorySet target_probes;
  int theta = 10;
  int window = 6;                 // T
  int gain_suffix = 0;           // l for gain estimation; 0 = shortest history trajectory
  int problem1_starts = 3;
  int horizon_cap = 1000000;
  bool diagonal_identifiability = false;

  // Ground-truth overrides, for stage-isolation studies.
  std::optional<VectorXd> known_target;
  std::optional<LQRObjective> known_objective;
  std::optional<int> known_horizon;
  /// Benchmark-only: reference weights for the implied scale alpha.
  std::optional<LQRObjective> reference_objective;
};

struct ReconstructionReport {
  int schema_version = kReportSchemaVersion;
  Setting setting = Setting::kClassic;
  std::vector<std::string> completed_stages;
  std::string failed_stage;
  ErrorCode error_code = ErrorCode::kStructural;
  std::string error_message;

  // target
  std::string target_method;
  VectorXd target;
  double target_gap = 0.0;

  // weights
  std::string weights_method;
  MatrixXd H, Q, R;
  double tau = 0.0;
  std::string scale_note;
  std::optional<double> alpha;  // set when reference weights are given

  // final-state setting
  double problem1_residual = 0.0;
  int problem1_iterations = 0;
  bool problem1_converged = false;
  std::string problem1_message;

  // classic setting
  int gain_suffix = 0;
  std::vector<MatrixXd> estimated_gains;
  std::vector<double> gain_gram_min_sv;
  std::optional<FeasibilityReport> feasibility;
  std::optional<IdentifiabilityReport> identifiability;
  std::string weights_note;

  // horizon
  int n_star = 0;
  int theta = 0;
  std::vector<std::pair<int, int>> horizon_bounds;
  std::map<int, double> horizon_evaluations;

  // reconstruction and prediction
  GainSequence gains;  // K_0..K_{N*-1} of the reconstructed problem
  int observed_steps = 0;
  VectorXd current_state;     // world frame
  MatrixXd current_covariance;
  int remaining_horizon = 0;
  VectorXd mu0;
  std::vector<VectorXd> forecast;  // world frame, steps l+1..N*

  bool ok() const { return failed_stage.empty(); }
};

/// Runs the stages in order. A failing stage stops the run; the report keeps
/// everything computed before it plus the stage name and error.
ReconstructionReport run_pipeline(const TrajectorySet& history, const Trajectory& current,
                                  const LinearSystem& sys, const PipelineOptions& options);

}  // namespace lqr_recon
