#pragma once

// Quantities estimated directly from observations: the target state, the
// input/state reconstruction filter, Kalman filtering of the current state,
// per-step gain least squares and the constant-gain (VAR(1)) estimator.

#include <vector>

#include "lqr_recon/model.hpp"

namespace lqr_recon {

enum class TargetMethod { kLineIntersection, kFinalStateAverage };

const char* to_string(TargetMethod m);

struct TargetOptions {
  /// Accepted closest-approach gap between the two fitted lines. Negative
  /// means 10 * max(noise_std), floored at 1e-8 * (1 + scale of the data).
  double gap_tolerance = -1.0;
  /// Minimum angle between fitted directions, radians.
  double min_angle = 1e-3;
};

struct TargetEstimate {
  VectorXd target;
  double gap = 0.0;    // LineIntersection only
  double angle = 0.0;  // radians, LineIntersection only
};

/// Works on world-frame outputs; states are recovered as C^{-1} y.
TargetEstimate estimate_target(const LinearSystem& sys, const TrajectorySet& data,
                               TargetMethod method, const TargetOptions& options = {});

struct FilterResult {
  std::vector<VectorXd> inputs;  // u_0..u_{l-1}
  std::vector<VectorXd> states;  // x_0..x_l
};

/// Inverts the plant along one error-coordinate trajectory:
/// x_0 = C^{-1} y_0, u_{k-1} = D^+ (y_k - C A x_{k-1}), x_k = A x_{k-1} + B u_{k-1}
/// with D = CB. Throws kRankDeficient when D lacks full column rank.
FilterResult reconstruct_inputs_states(const LinearSystem& sys, const Trajectory& traj);

struct KalmanResult {
  VectorXd state;       // x_{l|l}
  MatrixXd covariance;  // P_{l|l}
};

/// Filters the error-coordinate trajectory y_0..y_l through the closed loop
/// x_{k+1} = (A - B K_k) x_k, using gains[k] for k < l. No process noise.
KalmanResult kalman_state(const LinearSystem& sys, const std::vector<MatrixXd>& gains,
                          const Trajectory& traj);

struct GainEstimate {
  GainSequence gains;                 // K_0..K_{l-1} of the aligned suffix
  std::vector<double> gram_min_sv;    // smallest singular value of X_k X_k' per k
};

/// Per-step least squares over M error-coordinate trajectories that all end
/// at the final state. Each is truncated to its last l+1 outputs so that
/// index k refers to the same number of steps-to-go in every trajectory.
GainEstimate estimate_gain_sequence(const LinearSystem& sys, const TrajectorySet& data, int l);

struct InfiniteGainEstimate {
  MatrixXd closed_loop;  // A^c estimate
  MatrixXd gain;         // K estimate
  bool bias_corrected = false;
  bool fallback_to_ols = false;
};

/// Constant-gain estimator on one error-coordinate trajectory. The observed
/// Gram matrix YY'/l is debiased by subtracting Gamma when the noise is
/// nonzero; if that leaves it indefinite the plain least-squares form is
/// used and fallback_to_ols is set.
InfiniteGainEstimate estimate_infinite_gain(const LinearSystem& sys, const Trajectory& traj);

}  // namespace lqr_recon
