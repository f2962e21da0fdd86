#pragma once

// Independent reference computations and random instance generators shared
// by the unit and acceptance tests. Nothing here calls the recursion or
// estimator it is meant to check.

#include <cstdint>
#include <vector>

#include "lqr_recon/model.hpp"
#include "lqr_recon/rng.hpp"

namespace lqr_recon::testing {

/// Random controllable plant with invertible A and full-column-rank B.
/// A is rescaled to spectral radius `radius`.
LinearSystem random_system(GaussianRng& rng, int n, int m, double radius = 1.0);

/// G G' + floor I.
MatrixXd random_spd(GaussianRng& rng, int k, double floor = 0.5);

LQRObjective random_classic_objective(GaussianRng& rng, int n, int m);

/// Optimal inputs by eliminating the states: x = F x0 + G u, then solving
/// the normal equations of the quadratic in the stacked input vector.
std::vector<VectorXd> condensed_qp_inputs(const LinearSystem& sys, const LQRObjective& obj,
                                          int horizon, const VectorXd& x0);

/// Cost of an input sequence from x0 (error coordinates).
double lqr_cost(const LinearSystem& sys, const LQRObjective& obj, const VectorXd& x0,
                const std::vector<VectorXd>& inputs);

/// J_N by explicit recursion and rollout, without caches.
double brute_force_jn(const LinearSystem& sys, const LQRObjective& obj, const Trajectory& observed,
                      const VectorXd& target, int n_hat);

/// Closest-approach midpoint of two lines p + t d.
VectorXd line_midpoint(const VectorXd& p1, const VectorXd& d1, const VectorXd& p2,
                       const VectorXd& d2);

/// The 3x3 reference plant of the shipped configurations.
LinearSystem reference_system(double noise_std);

/// Rotation-like plant (|eig(A)| = 1), which keeps the Riccati recursion
/// converging slowly enough for horizon studies at large N.
LinearSystem marginal_system(double noise_std);

double max_abs_diff(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b);
double max_abs_diff(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b);

}  // namespace lqr_recon::testing
