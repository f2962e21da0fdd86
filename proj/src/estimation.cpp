#include "lqr_recon/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"

namespace lqr_recon {

const char* to_string(TargetMethod m) {
  return m == TargetMethod::kLineIntersection ? "line-intersection" : "final-state-average";
}

namespace {

struct FittedLine {
  VectorXd origin;
  VectorXd direction;  // unit
};

FittedLine fit_line(const MatrixXd& points) {  // one point per column
  FittedLine line;
  line.origin = points.rowwise().mean();
  const MatrixXd centered = points.colwise() - line.origin;
  Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeThinU);
  line.direction = svd.matrixU().col(0);
  return line;
}

MatrixXd states_of(const LinearSystem& sys, const Trajectory& t) {
  return sys.C.fullPivLu().solve(t.as_matrix());
}

}  // namespace

TargetEstimate estimate_target(const LinearSystem& sys, const TrajectorySet& data,
                               TargetMethod method, const TargetOptions& options) {
  sys.check_dimensions();
  require(!data.empty(), ErrorCode::kPrecondition, "no trajectories");
  TargetEstimate est;

  if (method == TargetMethod::kFinalStateAverage) {
    require(data.all_contain_final_state(), ErrorCode::kPrecondition,
            "final-state average needs every trajectory flagged contains_final_state");
    VectorXd sum = VectorXd::Zero(sys.state_dim());
    for (const auto& t : data.trajectories) sum += t.outputs.back();
    est.target = sys.C.fullPivLu().solve(sum / static_cast<double>(data.size()));
    return est;
  }

  require(data.size() >= 2, ErrorCode::kDegenerateGeometry,
          "line intersection needs two trajectories");
  for (int j = 0; j < 2; ++j) {
    require(data.trajectories[j].length() >= 1, ErrorCode::kDegenerateGeometry,
            "line fit needs at least two points per trajectory");
  }
  const FittedLine l1 = fit_line(states_of(sys, data.trajectories[0]));
  const FittedLine l2 = fit_line(states_of(sys, data.trajectories[1]));

  const double cos_angle = std::clamp(std::abs(l1.direction.dot(l2.direction)), 0.0, 1.0);
  est.angle = std::acos(cos_angle);
  require(est.angle > options.min_angle, ErrorCode::kDegenerateGeometry,
          "fitted lines are parallel");

  // Closest points o1 + t1 v1, o2 + t2 v2 of two unit-direction lines.
  const VectorXd w = l1.origin - l2.origin;
  const double b = l1.direction.dot(l2.direction);
  const double d = l1.direction.dot(w);
  const double e = l2.direction.dot(w);
  const double denom = 1.0 - b * b;
  const double t1 = (b * e - d) / denom;
  const double t2 = (e - b * d) / denom;
  const VectorXd p1 = l1.origin + t1 * l1.direction;
  const VectorXd p2 = l2.origin + t2 * l2.direction;
  est.gap = (p1 - p2).norm();
  est.target = 0.5 * (p1 + p2);

  double eps = options.gap_tolerance;
  if (eps < 0.0) {
    const double sigma = sys.noise_std.size() ? sys.noise_std.maxCoeff() : 0.0;
    const double scale = 1.0 + std::max(l1.origin.norm(), l2.origin.norm());
    eps = std::max(10.0 * sigma, 1e-8 * scale);
  }
  require(est.gap <= eps, ErrorCode::kDegenerateGeometry,
          "fitted lines do not intersect (gap " + std::to_string(est.gap) + " > " +
              std::to_string(eps) + ")");
  return est;
}

FilterResult reconstruct_inputs_states(const LinearSystem& sys, const Trajectory& traj) {
  sys.check_dimensions();
  require(!traj.outputs.empty(), ErrorCode::kPrecondition, "empty trajectory");
  const MatrixXd d = sys.C * sys.B;
  require(linalg::numeric_rank(d, kRankTolerance) == sys.input_dim(), ErrorCode::kRankDeficient,
          "CB is not full column rank; the input filter is undefined");
  const MatrixXd d_pinv = linalg::pinv(d);
  const MatrixXd ca = sys.C * sys.A;

  FilterResult out;
  VectorXd x = sys.C.fullPivLu().solve(traj.outputs.front());
  out.states.push_back(x);
  for (std::size_t k = 1; k < traj.outputs.size(); ++k) {
    VectorXd u = d_pinv * (traj.outputs[k] - ca * x);
    x = sys.A * x + sys.B * u;
    out.inputs.push_back(std::move(u));
    out.states.push_back(x);
  }
  return out;
}

KalmanResult kalman_state(const LinearSystem& sys, const std::vector<MatrixXd>& gains,
                          const Trajectory& traj) {
  sys.check_dimensions();
  require(!traj.outputs.empty(), ErrorCode::kPrecondition, "empty trajectory");
  const int l = traj.length();
  require(static_cast<int>(gains.size()) >= l, ErrorCode::kPrecondition,
          "kalman_state needs a gain for every observed transition");
  const int n = sys.state_dim();
  const auto c_lu = sys.C.fullPivLu();
  const MatrixXd c_inv = c_lu.inverse();
  const MatrixXd gamma = sys.noise_covariance();

  KalmanResult res;
  if (sys.noiseless()) {
    // Zero measurement noise: the last output pins the state exactly.
    res.state = c_lu.solve(traj.outputs.back());
    res.covariance = MatrixXd::Zero(n, n);
    return res;
  }

  // Initial posterior from y_0 alone.
  VectorXd x = c_inv * traj.outputs.front();
  MatrixXd p = linalg::symmetrize(c_inv * gamma * c_inv.transpose());
  for (int k = 0; k < l; ++k) {
    const MatrixXd ac = sys.A - sys.B * gains[k];
    x = ac * x;
    p = linalg::symmetrize(ac * p * ac.transpose());
    const MatrixXd s = sys.C * p * sys.C.transpose() + gamma;
    // Gain L = P C' S^{-1}, computed as (S^{-1} C P)'.
    const MatrixXd gain_t = linalg::spd_solve(s, sys.C * p, "innovation covariance");
    const VectorXd innovation = traj.outputs[k + 1] - sys.C * x;
    x += gain_t.transpose() * innovation;
    // Joseph form keeps P symmetric PSD.
    const MatrixXd i_lc = MatrixXd::Identity(n, n) - gain_t.transpose() * sys.C;
    p = linalg::symmetrize(i_lc * p * i_lc.transpose() +
                           gain_t.transpose() * gamma * gain_t);
  }
  res.state = x;
  res.covariance = p;
  return res;
}

GainEstimate estimate_gain_sequence(const LinearSystem& sys, const TrajectorySet& data, int l) {
  sys.check_dimensions();
  const int n = sys.state_dim();
  const int m_count = static_cast<int>(data.size());
  require(m_count >= n, ErrorCode::kPrecondition,
          "gain estimation needs at least n trajectories (M = " + std::to_string(m_count) + ")");
  require(data.all_contain_final_state(), ErrorCode::kPrecondition,
          "gain estimation needs trajectories that contain their final state");
  require(l >= 1 && l <= data.min_length(), ErrorCode::kPrecondition,
          "suffix length must satisfy 1 <= l <= min trajectory length");

  std::vector<FilterResult> filtered;
  filtered.reserve(data.size());
  for (const auto& t : data.trajectories) filtered.push_back(reconstruct_inputs_states(sys, t.suffix(l)));

  const MatrixXd b_pinv = linalg::pinv(sys.B);
  GainEstimate est;
  for (int k = 0; k < l; ++k) {
    MatrixXd x(n, m_count), y(n, m_count);
    for (int j = 0; j < m_count; ++j) {
      x.col(j) = filtered[j].states[k];
      y.col(j) = filtered[j].states[k + 1];
    }
    const MatrixXd gram = x * x.transpose();
    const double min_sv = linalg::min_singular_value(gram);
    est.gram_min_sv.push_back(min_sv);
    require(linalg::numeric_rank(gram, kRankTolerance) == n, ErrorCode::kRankDeficient,
            "state Gram matrix singular at k = " + std::to_string(k));
    const MatrixXd ac = gram.ldlt().solve(x * y.transpose()).transpose();
    est.gains.gains.push_back(b_pinv * (sys.A - ac));
  }
  return est;
}

InfiniteGainEstimate estimate_infinite_gain(const LinearSystem& sys, const Trajectory& traj) {
  sys.check_dimensions();
  const int n = sys.state_dim();
  const int l = traj.length();
  require(l >= n, ErrorCode::kPrecondition, "trajectory too short for the regression");
  const MatrixXd ys = traj.as_matrix();
  const MatrixXd past = ys.leftCols(l);
  const MatrixXd next = ys.rightCols(l);
  const MatrixXd cross = next * past.transpose() / l;
  const MatrixXd gram = past * past.transpose() / l;

  InfiniteGainEstimate est;
  MatrixXd corrected = gram;
  if (!sys.noiseless()) {
    corrected = gram - sys.noise_covariance();
    est.bias_corrected = true;
    if (!linalg::is_positive_definite(corrected)) {
      corrected = gram;
      est.bias_corrected = false;
      est.fallback_to_ols = true;
    }
  }
  require(linalg::numeric_rank(corrected, kRankTolerance) == n, ErrorCode::kRankDeficient,
          "output Gram matrix is singular");
  // C^{-1} cross corrected^{-1} C
  const MatrixXd right = corrected.transpose().fullPivLu().solve(cross.transpose()).transpose();
  est.closed_loop = sys.C.fullPivLu().solve(right * sys.C);
  est.gain = linalg::pinv(sys.B) * (sys.A - est.closed_loop);
  return est;
}

}  // namespace lqr_recon
