#include "lqr_recon/model.hpp"

#include <algorithm>
#include <limits>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"

namespace lqr_recon {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kStructural: return "structural";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kNotConverged: return "not-converged";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kAmbiguous: return "ambiguous";
    case ErrorCode::kIndefinite: return "indefinite";
    case ErrorCode::kSearchFailed: return "search-failed";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

MatrixXd LinearSystem::noise_covariance() const {
  return noise_std.array().square().matrix().asDiagonal();
}

bool LinearSystem::noiseless() const {
  return noise_std.size() == 0 || noise_std.cwiseAbs().maxCoeff() == 0.0;
}

LinearSystem LinearSystem::with_noise(double std) const {
  LinearSystem copy = *this;
  copy.noise_std = VectorXd::Constant(C.rows(), std);
  return copy;
}

void LinearSystem::check_dimensions() const {
  const auto n = A.rows();
  require(n > 0 && A.cols() == n, ErrorCode::kStructural, "A must be square and non-empty");
  require(B.rows() == n && B.cols() > 0, ErrorCode::kStructural, "B must have n rows");
  require(C.rows() == C.cols(), ErrorCode::kStructural, "C must be square");
  require(C.rows() == n, ErrorCode::kStructural, "C must be n x n (p != n is not supported)");
  require(noise_std.size() == C.rows(), ErrorCode::kStructural,
          "noise_std must have one entry per output channel");
}

const char* to_string(Setting s) {
  return s == Setting::kFinalStateOnly ? "final-state" : "classic";
}

Setting setting_from_string(const std::string& s) {
  if (s == "final-state" || s == "FinalStateOnly" || s == "final_state") {
    return Setting::kFinalStateOnly;
  }
  if (s == "classic" || s == "Classic") return Setting::kClassic;
  fail(ErrorCode::kParse, "unknown setting '" + s + "'");
}

LQRObjective LQRObjective::final_state_only(const MatrixXd& r, int state_dim) {
  return {MatrixXd::Identity(state_dim, state_dim), MatrixXd::Zero(state_dim, state_dim), r,
          Setting::kFinalStateOnly};
}

LQRObjective LQRObjective::classic(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r) {
  return {h, q, r, Setting::kClassic};
}

LQRObjective LQRObjective::scaled(double alpha) const {
  return {alpha * H, alpha * Q, alpha * R, setting};
}

void LQRObjective::check(int state_dim, int input_dim) const {
  require(H.rows() == state_dim && H.cols() == state_dim, ErrorCode::kStructural, "H must be n x n");
  require(Q.rows() == state_dim && Q.cols() == state_dim, ErrorCode::kStructural, "Q must be n x n");
  require(R.rows() == input_dim && R.cols() == input_dim, ErrorCode::kStructural, "R must be m x m");
  const double sym_tol = 1e-9;
  require((H - H.transpose()).cwiseAbs().maxCoeff() <= sym_tol * (1.0 + H.norm()),
          ErrorCode::kDomain, "H must be symmetric");
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= sym_tol * (1.0 + Q.norm()),
          ErrorCode::kDomain, "Q must be symmetric");
  require((R - R.transpose()).cwiseAbs().maxCoeff() <= sym_tol * (1.0 + R.norm()),
          ErrorCode::kDomain, "R must be symmetric");
  require(linalg::is_positive_definite(H), ErrorCode::kDomain, "H must be positive definite");
  require(linalg::is_positive_definite(R), ErrorCode::kDomain, "R must be positive definite");
  require(linalg::is_positive_semidefinite(Q, 1e-12 * (1.0 + Q.norm())), ErrorCode::kDomain,
          "Q must be positive semidefinite");
  if (setting == Setting::kFinalStateOnly) {
    require((H - MatrixXd::Identity(state_dim, state_dim)).cwiseAbs().maxCoeff() == 0.0 &&
                Q.cwiseAbs().maxCoeff() == 0.0,
            ErrorCode::kDomain, "final-state setting requires H = I and Q = 0");
  }
}

VectorXd LQRProblemSpec::initial_error() const { return to_error_coordinates(initial, target); }

void LQRProblemSpec::check() const {
  system.check_dimensions();
  objective.check(system.state_dim(), system.input_dim());
  require(horizon >= 1, ErrorCode::kPrecondition, "horizon must be >= 1");
  require(target.size() == system.state_dim() && initial.size() == system.state_dim(),
          ErrorCode::kStructural, "target and initial must be n-vectors");
}

Trajectory Trajectory::suffix(int count) const {
  require(count >= 0 && count <= length(), ErrorCode::kPrecondition,
          "suffix longer than trajectory");
  Trajectory out;
  out.outputs.assign(outputs.end() - (count + 1), outputs.end());
  out.contains_final_state = contains_final_state;
  return out;
}

MatrixXd Trajectory::as_matrix() const {
  if (outputs.empty()) return {};
  MatrixXd m(outputs.front().size(), static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t i = 0; i < outputs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = outputs[i];
  return m;
}

int TrajectorySet::min_length() const {
  int l = std::numeric_limits<int>::max();
  for (const auto& t : trajectories) l = std::min(l, t.length());
  return trajectories.empty() ? 0 : l;
}

bool TrajectorySet::all_contain_final_state() const {
  return std::all_of(trajectories.begin(), trajectories.end(),
                     [](const Trajectory& t) { return t.contains_final_state; });
}

Trajectory shifted(const Trajectory& t, const MatrixXd& c, const VectorXd& target) {
  Trajectory out = t;
  const VectorXd offset = c * target;
  for (auto& y : out.outputs) y -= offset;
  return out;
}

TrajectorySet TrajectorySet::shifted(const MatrixXd& c, const VectorXd& target) const {
  TrajectorySet out;
  out.trajectories.reserve(trajectories.size());
  for (const auto& t : trajectories) out.trajectories.push_back(lqr_recon::shifted(t, c, target));
  return out;
}

ValidationReport validate_system(const LinearSystem& sys) {
  sys.check_dimensions();
  ValidationReport rep;
  const int n = sys.state_dim();
  const int m = sys.input_dim();

  const MatrixXd ctrb = linalg::controllability_matrix(sys.A, sys.B);
  rep.controllability_rank = linalg::numeric_rank(ctrb, kRankTolerance);
  rep.controllability_min_sv = linalg::min_singular_value(ctrb);
  rep.controllable = rep.controllability_rank == n;
  if (!rep.controllable) rep.failures.push_back("(A, B) is not controllable");

  rep.b_rank = linalg::numeric_rank(sys.B, kRankTolerance);
  rep.b_min_sv = linalg::min_singular_value(sys.B);
  rep.b_full_column_rank = rep.b_rank == m;
  if (!rep.b_full_column_rank) rep.failures.push_back("B is not full column rank");

  rep.a_min_sv = linalg::min_singular_value(sys.A);
  rep.a_invertible = linalg::numeric_rank(sys.A, kRankTolerance) == n;
  if (!rep.a_invertible) rep.failures.push_back("A is not invertible");

  rep.c_min_sv = linalg::min_singular_value(sys.C);
  rep.c_invertible = linalg::numeric_rank(sys.C, kRankTolerance) == sys.output_dim();
  if (!rep.c_invertible) rep.failures.push_back("C is not invertible");

  rep.noise_nonnegative = sys.noise_std.size() == 0 || sys.noise_std.minCoeff() >= 0.0;
  if (!rep.noise_nonnegative) rep.failures.push_back("noise_std has negative entries");
  return rep;
}

VectorXd to_error_coordinates(const VectorXd& initial, const VectorXd& target) {
  require(initial.size() == target.size(), ErrorCode::kStructural,
          "initial and target dimensions differ");
  return initial - target;
}

}  // namespace lqr_recon
