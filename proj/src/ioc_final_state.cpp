#include "lqr_recon/ioc_final_state.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"

namespace lqr_recon {

VectorXd PmpStackedSystem::solve(const VectorXd& x0) const {
  return F.fullPivLu().solve(A_tilde * x0);
}

PmpStackedSystem build_pmp_system(const LinearSystem& sys, const MatrixXd& h, const MatrixXd& r,
                                  int horizon) {
  sys.check_dimensions();
  require(horizon >= 1, ErrorCode::kPrecondition, "horizon must be >= 1");
  require(linalg::is_positive_definite(r), ErrorCode::kDomain, "R must be positive definite");
  const int n = sys.state_dim();
  const int big_n = horizon;
  const int dim = 2 * n * big_n;
  const MatrixXd brb = sys.B * linalg::spd_solve(r, sys.B.transpose(), "R");
  const MatrixXd id = MatrixXd::Identity(n, n);
  auto x_col = [n](int i) { return 2 * n * (i - 1); };      // x_i, i = 1..N
  auto l_col = [n](int i) { return 2 * n * (i - 1) + n; };  // lambda_i

  PmpStackedSystem s;
  s.horizon = horizon;
  s.F = MatrixXd::Zero(dim, dim);
  s.A_tilde = MatrixXd::Zero(dim, n);
  int row = 0;
  // Dynamics x_{i+1} - A x_i + B R^{-1} B' lambda_{i+1} = 0.
  for (int i = 0; i < big_n; ++i, row += n) {
    s.F.block(row, x_col(i + 1), n, n) = id;
    s.F.block(row, l_col(i + 1), n, n) = brb;
    if (i == 0) {
      s.A_tilde.block(row, 0, n, n) = sys.A;
    } else {
      s.F.block(row, x_col(i), n, n) = -sys.A;
    }
  }
  // Costate lambda_i - A' lambda_{i+1} = 0.
  for (int i = 1; i < big_n; ++i, row += n) {
    s.F.block(row, l_col(i), n, n) = id;
    s.F.block(row, l_col(i + 1), n, n) = -sys.A.transpose();
  }
  // Terminal lambda_N - H x_N = 0.
  s.F.block(row, l_col(big_n), n, n) = id;
  s.F.block(row, x_col(big_n), n, n) = -h;

  s.G_X = MatrixXd::Zero(n * big_n, dim);
  for (int i = 1; i <= big_n; ++i) s.G_X.block(n * (i - 1), x_col(i), n, n) = id;
  return s;
}

namespace {

// Trajectories grouped by horizon so each F(R) is factored once.
struct HorizonGroup {
  int horizon = 0;
  MatrixXd x0;       // n x count
  MatrixXd targets;  // nN x count, stacked error-coordinate outputs y_1..y_N
};

std::vector<HorizonGroup> group_by_horizon(const LinearSystem& sys, const TrajectorySet& data,
                                           const VectorXd& target) {
  require(!data.empty(), ErrorCode::kPrecondition, "no trajectories");
  require(target.size() == sys.state_dim(), ErrorCode::kStructural, "target must be an n-vector");
  const int n = sys.state_dim();
  const auto c_lu = sys.C.fullPivLu();
  const VectorXd offset = sys.C * target;
  std::map<int, std::vector<const Trajectory*>> by_len;
  for (const auto& t : data.trajectories) {
    require(t.length() >= 1, ErrorCode::kPrecondition, "trajectory needs at least two outputs");
    by_len[t.length()].push_back(&t);
  }
  std::vector<HorizonGroup> groups;
  for (const auto& [len, trajs] : by_len) {
    HorizonGroup g;
    g.horizon = len;
    const auto count = static_cast<Eigen::Index>(trajs.size());
    g.x0.resize(n, count);
    g.targets.resize(static_cast<Eigen::Index>(n) * len, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      const auto& ys = trajs[j]->outputs;
      g.x0.col(j) = c_lu.solve(ys[0]) - target;
      for (int i = 1; i <= len; ++i) g.targets.block(n * (i - 1), j, n, 1) = ys[i] - offset;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

// Stacked residual vector scaled by 1/sqrt(M) so its squared norm is the objective.
VectorXd residual_vector(const LinearSystem& sys, const MatrixXd& r,
                         const std::vector<HorizonGroup>& groups, std::size_t total) {
  const int n = sys.state_dim();
  const MatrixXd h = MatrixXd::Identity(n, n);
  Eigen::Index size = 0;
  for (const auto& g : groups) size += g.targets.size();
  VectorXd res(size);
  Eigen::Index at = 0;
  const double w = 1.0 / std::sqrt(static_cast<double>(total));
  for (const auto& g : groups) {
    const PmpStackedSystem s = build_pmp_system(sys, h, r, g.horizon);
    const Eigen::PartialPivLU<MatrixXd> lu(s.F);
    const MatrixXd z = lu.solve(s.A_tilde * g.x0);
    const MatrixXd states = s.G_X * z;
    MatrixXd diff = g.targets;
    for (int i = 0; i < g.horizon; ++i) {
      diff.middleRows(n * i, n) -= sys.C * states.middleRows(n * i, n);
    }
    res.segment(at, diff.size()) = w * diff.reshaped();
    at += diff.size();
  }
  return res;
}

constexpr double kJitter = 1e-8;

Eigen::Index param_dim(int m) { return static_cast<Eigen::Index>(m) * (m + 1) / 2; }

MatrixXd r_from_params(const VectorXd& theta, int m) {
  MatrixXd l = MatrixXd::Zero(m, m);
  Eigen::Index k = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) l(i, j) = theta(k++);
  }
  return l * l.transpose() + kJitter * MatrixXd::Identity(m, m);
}

VectorXd params_from_r(const MatrixXd& r) {
  const int m = static_cast<int>(r.rows());
  MatrixXd shifted = linalg::symmetrize(r) - kJitter * MatrixXd::Identity(m, m);
  Eigen::LLT<MatrixXd> llt(shifted);
  require(llt.info() == Eigen::Success, ErrorCode::kDomain, "start R must be positive definite");
  const MatrixXd l = llt.matrixL();
  VectorXd theta(param_dim(m));
  Eigen::Index k = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) theta(k++) = l(i, j);
  }
  return theta;
}

struct DescentOutcome {
  VectorXd theta;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

DescentOutcome gauss_newton(const LinearSystem& sys, const std::vector<HorizonGroup>& groups,
                            std::size_t total, VectorXd theta, const Problem1Options& opt) {
  const int m = sys.input_dim();
  auto eval = [&](const VectorXd& t) { return residual_vector(sys, r_from_params(t, m), groups, total); };

  DescentOutcome out;
  VectorXd res = eval(theta);
  double cost = res.squaredNorm();
  double mu = -1.0;
  double nu = 2.0;
  const Eigen::Index p = theta.size();
  for (int it = 1; it <= opt.max_iterations; ++it) {
    out.iterations = it;
    MatrixXd jac(res.size(), p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const double h = opt.fd_step * std::max(1.0, std::abs(theta(i)));
      VectorXd tp = theta, tm = theta;
      tp(i) += h;
      tm(i) -= h;
      jac.col(i) = (eval(tp) - eval(tm)) / (2.0 * h);
    }
    const VectorXd grad = jac.transpose() * res;
    if (2.0 * grad.norm() < opt.gradient_tolerance) {
      out.converged = true;
      out.message = "gradient tolerance reached";
      break;
    }
    const MatrixXd jtj = jac.transpose() * jac;
    if (mu < 0.0) mu = 1e-3 * jtj.diagonal().maxCoeff();

    bool accepted = false;
    bool tiny_step = false;
    while (!accepted) {
      MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu;
      const VectorXd step = lhs.ldlt().solve(-grad);
      if (step.norm() < 1e-14 * (theta.norm() + 1e-14)) {
        tiny_step = true;
        break;
      }
      const VectorXd cand = theta + step;
      const VectorXd cand_res = eval(cand);
      const double cand_cost = cand_res.squaredNorm();
      const double predicted = -(2.0 * step.dot(grad) + step.dot(jtj * step));
      if (cand_cost < cost && predicted > 0.0) {
        const double rho = (cost - cand_cost) / predicted;
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        theta = cand;
        res = cand_res;
        cost = cand_cost;
        accepted = true;
      } else {
        mu *= nu;
        nu *= 2.0;
        if (!std::isfinite(mu) || mu > 1e30) {
          tiny_step = true;
          break;
        }
      }
    }
    if (tiny_step) {
      out.converged = true;
      out.message = "step tolerance reached";
      break;
    }
  }
  if (out.message.empty()) out.message = "iteration limit reached";
  out.theta = theta;
  out.cost = cost;
  return out;
}

}  // namespace

double pmp_residual(const LinearSystem& sys, const MatrixXd& r, const TrajectorySet& data,
                    const VectorXd& target) {
  sys.check_dimensions();
  require(r.rows() == sys.input_dim() && r.cols() == sys.input_dim(), ErrorCode::kStructural,
          "R must be m x m");
  require(linalg::is_positive_definite(r), ErrorCode::kDomain, "R must be positive definite");
  const auto groups = group_by_horizon(sys, data, target);
  return residual_vector(sys, r, groups, data.size()).squaredNorm();
}

std::vector<MatrixXd> default_problem1_starts(int input_dim, int count) {
  static const double kScales[] = {1.0, 0.2, 5.0, 0.05, 20.0};
  std::vector<MatrixXd> starts;
  for (int i = 0; i < count; ++i) {
    const double s = i < 5 ? kScales[i] : std::pow(10.0, (i % 2 ? -1.0 : 1.0) * (i / 2));
    starts.push_back(s * MatrixXd::Identity(input_dim, input_dim));
  }
  return starts;
}

Problem1Result solve_problem1(const LinearSystem& sys, const TrajectorySet& data,
                              const VectorXd& target, const Problem1Options& options) {
  sys.check_dimensions();
  const int m = sys.input_dim();
  const auto groups = group_by_horizon(sys, data, target);
  std::vector<MatrixXd> starts = options.starts;
  if (starts.empty()) starts.push_back(MatrixXd::Identity(m, m));

  Problem1Result best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    require(start.rows() == m && start.cols() == m, ErrorCode::kStructural,
            "start R must be m x m");
    const DescentOutcome out = gauss_newton(sys, groups, data.size(), params_from_r(start), options);
    ++best.starts_tried;
    if (out.cost < best.residual) {
      best.R = linalg::symmetrize(r_from_params(out.theta, m));
      best.residual = out.cost;
      best.iterations = out.iterations;
      best.converged = out.converged;
      best.message = out.message;
    }
  }
  return best;
}

}  // namespace lqr_recon
