#pragma once

// Forward LQR: finite-horizon Riccati recursion, infinite-horizon DARE,
// closed-loop simulation and a direct quadratic solve used as an oracle.

#include <cstdint>
#include <vector>

#include "lqr_recon/model.hpp"

namespace lqr_recon {

/// P_k for k = 0..N (P_N = H) and the gains K_0..K_{N-1}.
struct RiccatiTrace {
  std::vector<MatrixXd> P;
  GainSequence gains;

  const MatrixXd& terminal() const { return P.back(); }
};

/// Backward recursion K_k = (R + B'P_{k+1}B)^{-1} B'P_{k+1}A,
/// P_k = K_k'RK_k + (A - BK_k)'P_{k+1}(A - BK_k) + Q, P_N = H.
RiccatiTrace riccati_gains(const LinearSystem& sys, const LQRObjective& obj, int horizon);
RiccatiTrace riccati_gains(const LQRProblemSpec& spec);

/// One backward step: returns (K, P_prev) from P_next.
std::pair<MatrixXd, MatrixXd> riccati_step(const LinearSystem& sys, const LQRObjective& obj,
                                           const MatrixXd& p_next);

/// Gains indexed by steps-to-go, grown on demand. Gains of any horizon N
/// are read off as K_k = gain(N - k); this is the shared-suffix property of
/// the recursion, so sweeps over horizons reuse one backward pass.
class RiccatiCache {
 public:
  RiccatiCache(LinearSystem sys, LQRObjective obj);

  /// Gain applied with `steps_to_go` steps remaining (>= 1).
  const MatrixXd& gain(int steps_to_go);
  /// Cost-to-go matrix with `steps_to_go` steps remaining (P(0) = H).
  const MatrixXd& cost(int steps_to_go);
  GainSequence gains_for_horizon(int horizon);
  const LinearSystem& system() const { return sys_; }

 private:
  void extend_to(int steps_to_go);

  LinearSystem sys_;
  LQRObjective obj_;
  std::vector<MatrixXd> p_;  // p_[s] = P with s steps to go
  std::vector<MatrixXd> k_;  // k_[s] = gain with s steps to go, k_[0] unused
};

struct DareSolution {
  MatrixXd P;
  MatrixXd K;
  int iterations = 0;
  double residual = 0.0;  // Frobenius norm of the last update
  double closed_loop_radius = 0.0;
};

struct DareOptions {
  double tolerance = 1e-12;  // on ||P_k - P_{k+1}||_F relative to max(1, ||P||_F)
  int max_iterations = 100000;
};

/// Fixed-point iteration of the Riccati map. Throws kNotConverged with the
/// last residual when the budget is exhausted.
DareSolution solve_dare(const LinearSystem& sys, const MatrixXd& q, const MatrixXd& r,
                        const DareOptions& options = {});

struct SimulationResult {
  std::vector<VectorXd> states;   // error coordinates x_0..x_N
  std::vector<VectorXd> inputs;   // u_0..u_{N-1}
  std::vector<VectorXd> outputs;  // original frame y_k = C (x_k + x_T) + w_k

  Trajectory observed(bool contains_final_state = true) const;
};

/// Closed-loop rollout from spec.initial_error(). Noise drawn from
/// GaussianRng(seed) in output-major order y_0, y_1, ...
SimulationResult simulate(const LQRProblemSpec& spec, const GainSequence& gains,
                          std::uint64_t seed);

/// Constant-gain closed loop x_{k+1} = (A - BK) x_k + process_std * v_k in
/// error coordinates, observed through C with sys.noise_std. Used to
/// generate persistently excited data for the infinite-horizon estimator.
SimulationResult simulate_constant_gain(const LinearSystem& sys, const MatrixXd& gain,
                                        const VectorXd& x0, int steps, double process_std,
                                        std::uint64_t seed);

/// Optimal inputs from the KKT system of the stacked equality-constrained
/// quadratic program in (x, u). Independent of the Riccati recursion.
std::vector<VectorXd> solve_p0_direct(const LQRProblemSpec& spec);

/// u_k = -K_k x_k rollout without noise, returning the inputs.
std::vector<VectorXd> rollout_inputs(const LinearSystem& sys, const GainSequence& gains,
                                     const VectorXd& x0);

}  // namespace lqr_recon
