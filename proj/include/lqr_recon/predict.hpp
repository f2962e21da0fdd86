#pragma once

// Using a reconstructed problem: the remaining-horizon subproblem, the
// current-input inference mu_0, state forecasts, a polynomial-regression
// baseline and the horizon-sensitivity diagnostics.

#include <string>
#include <vector>

#include "lqr_recon/model.hpp"

namespace lqr_recon {

/// Subproblem with horizon n_star - l started from the filtered current
/// state. `current_state` is in the world frame.
LQRProblemSpec reconstruct_problem(const LinearSystem& sys, const LQRObjective& objective,
                                   const VectorXd& target, int n_star, int l,
                                   const VectorXd& current_state);

/// mu_0 = -K_0 x_0 of the reconstructed problem.
VectorXd predict_input(const LQRProblemSpec& spec);

/// x_1..x_{N'} of the noiseless closed loop, in the world frame.
std::vector<VectorXd> predict_states(const LQRProblemSpec& spec);

/// Per-coordinate least-squares polynomial in t over the states C^{-1} y_t,
/// t = 0..l, evaluated at t = l+1..l+steps.
std::vector<VectorXd> baseline_polyfit_predict(const LinearSystem& sys, const Trajectory& observed,
                                               int order, int steps);

enum class RiccatiDirection { kRising, kFalling, kMixed };

const char* to_string(RiccatiDirection d);

struct SensitivityOptions {
  /// kappa in Gamma_F = Q_{a|b} / kappa; non-positive means lambda_max(P*).
  double kappa = -1.0;
};

struct SensitivityReport {
  RiccatiDirection direction = RiccatiDirection::kMixed;
  double kappa = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool failed = false;
  std::string failure;
  /// Index j counts steps-to-go: beta_lower[j] S_j <= S_{j+1} <= beta_upper[j] S_j
  /// with S_j the cost-to-go matrix j steps before the end (S_0 = H).
  std::vector<double> beta_lower;
  std::vector<double> beta_upper;
  /// Smallest eigenvalues of S_{j+1} - beta_lower[j] S_j and beta_upper[j] S_j - S_{j+1}.
  std::vector<double> lower_gap_min_eig;
  std::vector<double> upper_gap_min_eig;
  double eta_step = 0.0;  // bound on ||K_0 - K_1|| of the N + dN sequence
  double eta = 0.0;       // dN * eta_step * ||x_0||
  double k_step = 0.0;    // actual ||K_0 - K_1||
  double observed_gap = 0.0;  // ||mu_0^{(N+dN)} - mu_0^{(N)}||
};

/// Bounds relating mu_0 for horizons N and N + delta_n from x0. Spectral
/// norms throughout.
SensitivityReport sensitivity_diagnostics(const LinearSystem& sys, const LQRObjective& objective,
                                          int n, int delta_n, const VectorXd& x0,
                                          const SensitivityOptions& options = {});

}  // namespace lqr_recon
