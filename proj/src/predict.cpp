#include "lqr_recon/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"
#include "lqr_recon/lqr_forward.hpp"

namespace lqr_recon {

LQRProblemSpec reconstruct_problem(const LinearSystem& sys, const LQRObjective& objective,
                                   const VectorXd& target, int n_star, int l,
                                   const VectorXd& current_state) {
  require(n_star > l, ErrorCode::kPrecondition,
          "estimated horizon must exceed the number of observed steps");
  LQRProblemSpec spec;
  spec.system = sys;
  spec.objective = objective;
  spec.horizon = n_star - l;
  spec.target = target;
  spec.initial = current_state;
  spec.check();
  return spec;
}

VectorXd predict_input(const LQRProblemSpec& spec) {
  spec.check();
  const auto& sys = spec.system;
  // Only K_0 is needed: run the recursion down to the first step.
  MatrixXd p = spec.objective.H;
  MatrixXd k;
  for (int s = 0; s < spec.horizon; ++s) std::tie(k, p) = riccati_step(sys, spec.objective, p);
  return -k * spec.initial_error();
}

std::vector<VectorXd> predict_states(const LQRProblemSpec& spec) {
  const RiccatiTrace trace = riccati_gains(spec);
  const auto& sys = spec.system;
  std::vector<VectorXd> out;
  VectorXd x = spec.initial_error();
  for (int k = 0; k < spec.horizon; ++k) {
    x = sys.A * x - sys.B * (trace.gains[k] * x);
    out.push_back(x + spec.target);
  }
  return out;
}

std::vector<VectorXd> baseline_polyfit_predict(const LinearSystem& sys, const Trajectory& observed,
                                               int order, int steps) {
  sys.check_dimensions();
  const int l = observed.length();
  require(order >= 0, ErrorCode::kPrecondition, "polynomial order must be >= 0");
  require(l + 1 > order, ErrorCode::kPrecondition, "need more observations than the polynomial order");
  require(steps >= 0, ErrorCode::kPrecondition, "steps must be >= 0");
  const MatrixXd states = sys.C.fullPivLu().solve(observed.as_matrix());  // n x (l+1)

  // Time is rescaled to [0, 1] over the fit window for conditioning.
  const double scale = l > 0 ? static_cast<double>(l) : 1.0;
  auto row = [&](double t) {
    Eigen::RowVectorXd r(order + 1);
    double v = 1.0;
    for (int p = 0; p <= order; ++p) {
      r(p) = v;
      v *= t / scale;
    }
    return r;
  };
  MatrixXd vander(l + 1, order + 1);
  for (int t = 0; t <= l; ++t) vander.row(t) = row(t);
  require(linalg::numeric_rank(vander, 1e-12) == order + 1, ErrorCode::kRankDeficient,
          "Vandermonde matrix is rank deficient");
  const MatrixXd coeffs = vander.colPivHouseholderQr().solve(states.transpose());  // (order+1) x n

  std::vector<VectorXd> out;
  for (int s = 1; s <= steps; ++s) out.push_back((row(l + s) * coeffs).transpose());
  return out;
}

const char* to_string(RiccatiDirection d) {
  switch (d) {
    case RiccatiDirection::kRising: return "rising";
    case RiccatiDirection::kFalling: return "falling";
    case RiccatiDirection::kMixed: return "mixed";
  }
  return "mixed";
}

namespace {

double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// A' X B (R + B'YB)^{-1} R (R + B'YB)^{-1} B' X A
MatrixXd lower_increment(const LinearSystem& sys, const MatrixXd& r, const MatrixXd& x,
                         const MatrixXd& y) {
  const MatrixXd s = r + sys.B.transpose() * y * sys.B;
  const MatrixXd g = linalg::spd_solve(s, sys.B.transpose() * x * sys.A, "R + B'PB");
  return linalg::symmetrize(g.transpose() * r * g);
}

}  // namespace

SensitivityReport sensitivity_diagnostics(const LinearSystem& sys, const LQRObjective& objective,
                                          int n, int delta_n, const VectorXd& x0,
                                          const SensitivityOptions& options) {
  sys.check_dimensions();
  objective.check(sys.state_dim(), sys.input_dim());
  require(n >= 2, ErrorCode::kPrecondition, "sensitivity diagnostics need N >= 2");
  require(delta_n >= 0, ErrorCode::kPrecondition, "delta N must be >= 0");
  require(x0.size() == sys.state_dim(), ErrorCode::kStructural, "x0 must be an n-vector");
  const int nm = n + delta_n;
  const RiccatiTrace trace = riccati_gains(sys, objective, nm);
  auto stg = [&](int j) -> const MatrixXd& { return trace.P[nm - j]; };  // S_j

  SensitivityReport rep;
  const MatrixXd& h = objective.H;
  const MatrixXd& r = objective.R;
  const MatrixXd step = stg(1) - stg(0);
  const double tol = 1e-12 * (1.0 + stg(0).norm());
  if (linalg::min_eigenvalue(step) >= -tol) {
    rep.direction = RiccatiDirection::kRising;
  } else if (linalg::max_eigenvalue(step) <= tol) {
    rep.direction = RiccatiDirection::kFalling;
  } else {
    rep.direction = RiccatiDirection::kMixed;
  }

  const DareSolution dare = solve_dare(sys, objective.Q, r);
  rep.kappa = options.kappa > 0.0 ? options.kappa : linalg::max_eigenvalue(dare.P);
  // Q_a bounds the increment on a falling sequence (H >= P_k >= P*), Q_b on a rising one.
  const double sigma_a = linalg::min_eigenvalue(lower_increment(sys, r, dare.P, h)) / rep.kappa;
  const double sigma_b = linalg::min_eigenvalue(lower_increment(sys, r, h, dare.P)) / rep.kappa;
  switch (rep.direction) {
    case RiccatiDirection::kFalling: rep.sigma = sigma_a; break;
    case RiccatiDirection::kRising: rep.sigma = sigma_b; break;
    case RiccatiDirection::kMixed: rep.sigma = std::min(sigma_a, sigma_b); break;
  }
  // sigma at rounding level means the increment bound is singular (rank B < n).
  if (!(rep.sigma > 1e-12 && rep.sigma < 1.0)) {
    rep.failed = true;
    rep.failure = "sigma = " + std::to_string(rep.sigma) + " outside (0, 1); gamma undefined";
  }

  const MatrixXd h_isqrt = linalg::inv_sqrt_spd(h);
  const MatrixXd phi = linalg::symmetrize(h_isqrt * stg(1) * h_isqrt);
  if (!rep.failed) {
    rep.gamma = 1.0 / (1.0 - rep.sigma);
    const double gm1 = rep.gamma - 1.0;
    rep.c1 = std::max(0.0, (1.0 / linalg::min_eigenvalue(phi) - 1.0) * gm1);
    rep.c2 = std::max(0.0, (linalg::max_eigenvalue(phi) - 1.0) * gm1);
    double growth = gm1;  // gamma^j (gamma - 1)
    for (int j = 0; j < nm; ++j) {
      const double lo = std::isinf(growth) ? 1.0 : growth / (growth + rep.c1);
      const double hi = std::isinf(growth) ? 1.0 : (growth + rep.c2) / growth;
      rep.beta_lower.push_back(lo);
      rep.beta_upper.push_back(hi);
      rep.lower_gap_min_eig.push_back(linalg::min_eigenvalue(stg(j + 1) - lo * stg(j)));
      rep.upper_gap_min_eig.push_back(linalg::min_eigenvalue(hi * stg(j) - stg(j + 1)));
      growth *= rep.gamma;
    }
  }

  const MatrixXd bt = sys.B.transpose();
  const double pre_h = spectral_norm(linalg::spd_solve(r + bt * h * sys.B, bt, "R + B'HB"));
  const double pre_star = spectral_norm(linalg::spd_solve(r + bt * dare.P * sys.B, bt, "R + B'P*B"));
  double prefactor = 0.0;
  switch (rep.direction) {
    case RiccatiDirection::kRising: prefactor = pre_h; break;
    case RiccatiDirection::kFalling: prefactor = pre_star; break;
    case RiccatiDirection::kMixed: prefactor = std::max(pre_h, pre_star); break;
  }
  const double p_step = spectral_norm(trace.P[1] - trace.P[2]);
  rep.eta_step = prefactor * p_step * spectral_norm(sys.A);
  rep.eta = delta_n * rep.eta_step * x0.norm();
  rep.k_step = spectral_norm(trace.gains[0] - trace.gains[1]);
  // K_0 of the horizon-N problem is K_{dN} of the longer one.
  rep.observed_gap = ((trace.gains[0] - trace.gains[delta_n]) * x0).norm();
  return rep;
}

}  // namespace lqr_recon
