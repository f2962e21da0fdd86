#pragma once

// Domain types shared by every module, plus their validation.
//
// Coordinate conventions: observations y_k are recorded in the original
// (world) frame. The regulator works in error coordinates x_k - x_T; an output
// is moved into error coordinates by subtracting C x_T (TrajectorySet::shifted).
// Operations that do not take a target estimate expect error-coordinate data.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lqr_recon {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Plant x_{k+1} = A x_k + B u_k observed through y_k = C x_k + w_k with
/// w_k ~ N(0, diag(noise_std^2)). C is square.
struct LinearSystem {
  MatrixXd A;
  MatrixXd B;
  MatrixXd C;
  VectorXd noise_std;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }

  /// Gamma = diag(noise_std^2).
  MatrixXd noise_covariance() const;
  bool noiseless() const;
  LinearSystem with_noise(double std) const;

  /// Throws kStructural on inconsistent dimensions (including p != n).
  void check_dimensions() const;
};

enum class Setting { kFinalStateOnly, kClassic };

const char* to_string(Setting s);
Setting setting_from_string(const std::string& s);

struct LQRObjective {
  MatrixXd H;
  MatrixXd Q;
  MatrixXd R;
  Setting setting = Setting::kClassic;

  /// H = I, Q = 0.
  static LQRObjective final_state_only(const MatrixXd& r, int state_dim);
  static LQRObjective classic(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r);

  LQRObjective scaled(double alpha) const;

  /// Throws kStructural / kDomain when dimensions or definiteness fail.
  void check(int state_dim, int input_dim) const;
};

/// The forward problem: minimise the LQR cost from x_0 = initial - target
/// over `horizon` steps.
struct LQRProblemSpec {
  LinearSystem system;
  LQRObjective objective;
  int horizon = 1;
  VectorXd target;
  VectorXd initial;

  VectorXd initial_error() const;
  void check() const;
};

/// One observation sequence y_0..y_l (l = length()).
struct Trajectory {
  std::vector<VectorXd> outputs;
  bool contains_final_state = false;

  int length() const { return static_cast<int>(outputs.size()) - 1; }
  /// Last count+1 outputs.
  Trajectory suffix(int count) const;
  /// Columns y_0..y_l.
  MatrixXd as_matrix() const;
};

struct TrajectorySet {
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  int min_length() const;
  bool all_contain_final_state() const;
  /// Every output mapped to y - C * target.
  TrajectorySet shifted(const MatrixXd& c, const VectorXd& target) const;
};

Trajectory shifted(const Trajectory& t, const MatrixXd& c, const VectorXd& target);

/// u_k = -K_k x_k for k = 0..N-1.
struct GainSequence {
  std::vector<MatrixXd> gains;

  int horizon() const { return static_cast<int>(gains.size()); }
  const MatrixXd& operator[](std::size_t k) const { return gains[k]; }
};

struct ValidationReport {
  bool controllable = false;
  bool b_full_column_rank = false;
  bool a_invertible = false;
  bool c_invertible = false;
  bool noise_nonnegative = false;
  int controllability_rank = 0;
  int b_rank = 0;
  double controllability_min_sv = 0.0;
  double b_min_sv = 0.0;
  double a_min_sv = 0.0;
  double c_min_sv = 0.0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Relative singular-value threshold for the rank tests in validate_system.
inline constexpr double kRankTolerance = 1e-10;

ValidationReport validate_system(const LinearSystem& sys);

/// x0 = initial - target.
VectorXd to_error_coordinates(const VectorXd& initial, const VectorXd& target);

}  // namespace lqr_recon
