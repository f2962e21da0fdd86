#include "lqr_recon/lqr_forward.hpp"

#include <cmath>
#include <string>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"
#include "lqr_recon/rng.hpp"

namespace lqr_recon {

std::pair<MatrixXd, MatrixXd> riccati_step(const LinearSystem& sys, const LQRObjective& obj,
                                           const MatrixXd& p_next) {
  const MatrixXd bt_p = sys.B.transpose() * p_next;
  const MatrixXd s = obj.R + bt_p * sys.B;
  MatrixXd k = linalg::spd_solve(s, bt_p * sys.A, "R + B'PB");
  const MatrixXd ac = sys.A - sys.B * k;
  MatrixXd p = k.transpose() * obj.R * k + ac.transpose() * p_next * ac + obj.Q;
  return {std::move(k), linalg::symmetrize(p)};
}

RiccatiTrace riccati_gains(const LinearSystem& sys, const LQRObjective& obj, int horizon) {
  require(horizon >= 1, ErrorCode::kPrecondition, "horizon must be >= 1");
  RiccatiTrace trace;
  trace.P.resize(static_cast<std::size_t>(horizon) + 1);
  trace.gains.gains.resize(static_cast<std::size_t>(horizon));
  trace.P[horizon] = linalg::symmetrize(obj.H);
  for (int k = horizon - 1; k >= 0; --k) {
    auto [gain, p] = riccati_step(sys, obj, trace.P[k + 1]);
    trace.gains.gains[k] = std::move(gain);
    trace.P[k] = std::move(p);
  }
  return trace;
}

RiccatiTrace riccati_gains(const LQRProblemSpec& spec) {
  spec.check();
  return riccati_gains(spec.system, spec.objective, spec.horizon);
}

RiccatiCache::RiccatiCache(LinearSystem sys, LQRObjective obj)
    : sys_(std::move(sys)), obj_(std::move(obj)) {
  p_.push_back(linalg::symmetrize(obj_.H));
  k_.emplace_back();
}

void RiccatiCache::extend_to(int steps_to_go) {
  while (static_cast<int>(p_.size()) <= steps_to_go) {
    auto [gain, p] = riccati_step(sys_, obj_, p_.back());
    k_.push_back(std::move(gain));
    p_.push_back(std::move(p));
  }
}

const MatrixXd& RiccatiCache::gain(int steps_to_go) {
  require(steps_to_go >= 1, ErrorCode::kPrecondition, "steps_to_go must be >= 1");
  extend_to(steps_to_go);
  return k_[steps_to_go];
}

const MatrixXd& RiccatiCache::cost(int steps_to_go) {
  require(steps_to_go >= 0, ErrorCode::kPrecondition, "steps_to_go must be >= 0");
  extend_to(steps_to_go);
  return p_[steps_to_go];
}

GainSequence RiccatiCache::gains_for_horizon(int horizon) {
  require(horizon >= 1, ErrorCode::kPrecondition, "horizon must be >= 1");
  extend_to(horizon);
  GainSequence seq;
  seq.gains.reserve(horizon);
  for (int k = 0; k < horizon; ++k) seq.gains.push_back(k_[horizon - k]);
  return seq;
}

DareSolution solve_dare(const LinearSystem& sys, const MatrixXd& q, const MatrixXd& r,
                        const DareOptions& options) {
  sys.check_dimensions();
  const int n = sys.state_dim();
  LQRObjective obj = LQRObjective::classic(MatrixXd::Identity(n, n), q, r);
  obj.check(n, sys.input_dim());

  // Start from a positive-definite matrix; with Q singular the iteration
  // started at Q can stall on a non-stabilizing fixed point.
  MatrixXd p = MatrixXd::Identity(n, n) + q;
  double residual = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    auto [k, p_new] = riccati_step(sys, obj, p);
    residual = (p_new - p).norm();
    p = std::move(p_new);
    if (residual < options.tolerance * std::max(1.0, p.norm())) {
      DareSolution sol;
      const MatrixXd bt_p = sys.B.transpose() * p;
      sol.K = linalg::spd_solve(r + bt_p * sys.B, bt_p * sys.A, "R + B'PB");
      sol.P = p;
      sol.iterations = it;
      sol.residual = residual;
      sol.closed_loop_radius = linalg::spectral_radius(sys.A - sys.B * sol.K);
      require(sol.closed_loop_radius < 1.0, ErrorCode::kNumerical,
              "DARE fixed point is not stabilizing (spectral radius " +
                  std::to_string(sol.closed_loop_radius) + ")");
      return sol;
    }
  }
  fail(ErrorCode::kNotConverged,
       "DARE iteration limit reached; last residual " + std::to_string(residual));
}

Trajectory SimulationResult::observed(bool contains_final_state) const {
  Trajectory t;
  t.outputs = outputs;
  t.contains_final_state = contains_final_state;
  return t;
}

namespace {

VectorXd observe(const LinearSystem& sys, const VectorXd& x_world, GaussianRng& rng) {
  VectorXd y = sys.C * x_world;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double draw = rng.normal();
    y(i) += sys.noise_std(i) * draw;
  }
  return y;
}

}  // namespace

SimulationResult simulate(const LQRProblemSpec& spec, const GainSequence& gains,
                          std::uint64_t seed) {
  spec.system.check_dimensions();
  require(gains.horizon() == spec.horizon, ErrorCode::kPrecondition,
          "gain sequence length must equal the horizon");
  const auto& sys = spec.system;
  GaussianRng rng(seed);
  SimulationResult out;
  VectorXd x = spec.initial_error();
  out.states.push_back(x);
  out.outputs.push_back(observe(sys, x + spec.target, rng));
  for (int k = 0; k < spec.horizon; ++k) {
    VectorXd u = -gains[k] * x;
    x = sys.A * x + sys.B * u;
    out.inputs.push_back(std::move(u));
    out.states.push_back(x);
    out.outputs.push_back(observe(sys, x + spec.target, rng));
  }
  return out;
}

SimulationResult simulate_constant_gain(const LinearSystem& sys, const MatrixXd& gain,
                                        const VectorXd& x0, int steps, double process_std,
                                        std::uint64_t seed) {
  sys.check_dimensions();
  GaussianRng rng(seed);
  GaussianRng process_rng(derive_seed(seed, 1));
  SimulationResult out;
  VectorXd x = x0;
  out.states.push_back(x);
  out.outputs.push_back(observe(sys, x, rng));
  for (int k = 0; k < steps; ++k) {
    VectorXd u = -gain * x;
    x = sys.A * x + sys.B * u + process_std * process_rng.normal_vector(sys.state_dim());
    out.inputs.push_back(std::move(u));
    out.states.push_back(x);
    out.outputs.push_back(observe(sys, x, rng));
  }
  return out;
}

std::vector<VectorXd> solve_p0_direct(const LQRProblemSpec& spec) {
  spec.check();
  const auto& sys = spec.system;
  const auto& obj = spec.objective;
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int big_n = spec.horizon;
  require(big_n * m <= 2000, ErrorCode::kPrecondition, "direct solve limited to N*m <= 2000");

  // Unknowns z = [u_0..u_{N-1}, x_1..x_N]; the equality-constrained
  // quadratic is solved through its optimality (KKT) system, which stays
  // well conditioned for unstable A where the condensed Hessian does not.
  const int nu = big_n * m;
  const int nz = nu + big_n * n;
  const int nc = big_n * n;
  MatrixXd kkt = MatrixXd::Zero(nz + nc, nz + nc);
  VectorXd rhs = VectorXd::Zero(nz + nc);
  for (int k = 0; k < big_n; ++k) {
    kkt.block(k * m, k * m, m, m) = obj.R;
    const MatrixXd& w = (k == big_n - 1) ? obj.H : obj.Q;
    kkt.block(nu + k * n, nu + k * n, n, n) = w;
  }
  const VectorXd x0 = spec.initial_error();
  for (int k = 0; k < big_n; ++k) {
    const int row = nz + k * n;
    // x_{k+1} - A x_k - B u_k = 0
    kkt.block(row, nu + k * n, n, n) = MatrixXd::Identity(n, n);
    kkt.block(row, k * m, n, m) = -sys.B;
    if (k == 0) {
      rhs.segment(row, n) = sys.A * x0;
    } else {
      kkt.block(row, nu + (k - 1) * n, n, n) = -sys.A;
    }
  }
  kkt.topRightCorner(nz, nc) = kkt.bottomLeftCorner(nc, nz).transpose();

  Eigen::FullPivLU<MatrixXd> lu(kkt);
  require(lu.isInvertible(), ErrorCode::kNumerical, "singular optimality system");
  const VectorXd z = lu.solve(rhs);
  std::vector<VectorXd> u(big_n);
  for (int k = 0; k < big_n; ++k) u[k] = z.segment(k * m, m);
  return u;
}

std::vector<VectorXd> rollout_inputs(const LinearSystem& sys, const GainSequence& gains,
                                     const VectorXd& x0) {
  std::vector<VectorXd> u;
  VectorXd x = x0;
  for (int k = 0; k < gains.horizon(); ++k) {
    u.push_back(-gains[k] * x);
    x = sys.A * x + sys.B * u.back();
  }
  return u;
}

}  // namespace lqr_recon
