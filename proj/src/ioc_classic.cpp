#include "lqr_recon/ioc_classic.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_multimin.h>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"

namespace lqr_recon {

namespace {

MatrixXd kron(const MatrixXd& x, const MatrixXd& y) {
  MatrixXd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

VectorXd vec(const MatrixXd& m) { return m.reshaped(); }

}  // namespace

MatrixXd Lemma4Coefficients::identity_residual(int i, const MatrixXd& h, const MatrixXd& q,
                                               const MatrixXd& r) const {
  require(i >= 1 && i <= window(), ErrorCode::kPrecondition, "identity index out of range");
  const Lemma4Block& blk = blocks[i - 1];
  const int n = state_dim;
  const int m = input_dim;
  MatrixXd lhs = MatrixXd::Zero(m, n);
  for (int t = 0; t < i; ++t) lhs += blk.a.middleCols(t * m, m) * r * blk.b.middleRows(t * m, m);
  MatrixXd rhs = blk.c.leftCols(n) * h * blk.d.topRows(n);
  for (int t = 1; t < i; ++t) rhs += blk.c.middleCols(t * n, n) * q * blk.d.middleRows(t * n, n);
  return lhs - rhs;
}

Lemma4Coefficients build_lemma4(const LinearSystem& sys, const std::vector<MatrixXd>& gains) {
  sys.check_dimensions();
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int big_n = static_cast<int>(gains.size());  // window indexed 0..T-1, N = T
  require(big_n >= 1, ErrorCode::kPrecondition, "need at least one gain");
  std::vector<MatrixXd> ac(big_n);
  for (int k = 0; k < big_n; ++k) {
    require(gains[k].rows() == m && gains[k].cols() == n, ErrorCode::kStructural,
            "gain must be m x n");
    ac[k] = sys.A - sys.B * gains[k];
  }
  const MatrixXd bt = sys.B.transpose();

  Lemma4Coefficients out;
  out.state_dim = n;
  out.input_dim = m;
  for (int i = 1; i <= big_n; ++i) {
    const int first = big_n - i;  // time index of the gain being explained
    // phi[j - first - 1] = A^c_{j-1} ... A^c_{first+1} for j = first+1..N
    std::vector<MatrixXd> phi;
    phi.push_back(MatrixXd::Identity(n, n));
    for (int j = first + 2; j <= big_n; ++j) phi.push_back(ac[j - 1] * phi.back());
    auto phi_at = [&](int j) -> const MatrixXd& { return phi[j - first - 1]; };
    auto psi_at = [&](int j) -> MatrixXd { return phi_at(j) * ac[first]; };

    Lemma4Block blk;
    blk.a.resize(m, i * m);
    blk.b.resize(i * m, n);
    blk.a.leftCols(m) = MatrixXd::Identity(m, m);
    blk.b.topRows(m) = gains[first];
    for (int t = 1; t < i; ++t) {
      const int j = first + t;
      blk.a.middleCols(t * m, m) = -bt * phi_at(j).transpose() * gains[j].transpose();
      blk.b.middleRows(t * m, m) = gains[j] * psi_at(j);
    }
    blk.c.resize(m, i * n);
    blk.d.resize(i * n, n);
    for (int t = 0; t < i; ++t) {
      const int j = big_n - t;  // H block first, then Q blocks in decreasing j
      blk.c.middleCols(t * n, n) = bt * phi_at(j).transpose();
      blk.d.middleRows(t * n, n) = psi_at(j);
    }
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

int WeightLayout::r_dim() const { return linalg::sym_dim(m); }
int WeightLayout::hq_dim() const { return linalg::sym_dim(n); }
int WeightLayout::size() const { return r_dim() + 2 * hq_dim(); }

VectorXd WeightLayout::pack(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r) const {
  VectorXd theta(size());
  theta << linalg::sym_to_coords(r), linalg::sym_to_coords(h), linalg::sym_to_coords(q);
  return theta;
}

void WeightLayout::unpack(const VectorXd& theta, MatrixXd& h, MatrixXd& q, MatrixXd& r) const {
  r = linalg::coords_to_sym(theta.head(r_dim()), m);
  h = linalg::coords_to_sym(theta.segment(r_dim(), hq_dim()), n);
  q = linalg::coords_to_sym(theta.tail(hq_dim()), n);
}

VectorXd StackedIdentificationSystem::replicated_theta(const MatrixXd& h, const MatrixXd& q,
                                                       const MatrixXd& r) const {
  const int n = layout.n;
  const int m = layout.m;
  const int t_win = window;
  VectorXd theta(t_win * m * m + t_win * n * n);
  for (int c = 0; c < t_win; ++c) theta.segment(c * m * m, m * m) = vec(r);
  theta.segment(t_win * m * m, n * n) = vec(h);
  for (int c = 1; c < t_win; ++c) theta.segment(t_win * m * m + c * n * n, n * n) = vec(q);
  return theta;
}

StackedIdentificationSystem build_stacked_system(const Lemma4Coefficients& coeffs) {
  const int n = coeffs.state_dim;
  const int m = coeffs.input_dim;
  const int t_win = coeffs.window();
  StackedIdentificationSystem s;
  s.layout = WeightLayout{n, m};
  s.window = t_win;
  const int rows = m * n;
  const int p = s.layout.size();
  s.Phi = MatrixXd::Zero(rows * t_win, p);
  s.Phi_replicated = MatrixXd::Zero(rows * t_win, t_win * m * m + t_win * n * n);

  const MatrixXd zn = MatrixXd::Zero(n, n);
  const MatrixXd zm = MatrixXd::Zero(m, m);
  for (int i = 1; i <= t_win; ++i) {
    const int row = (i - 1) * rows;
    for (int k = 0; k < p; ++k) {
      MatrixXd h = zn, q = zn, r = zm;
      if (k < s.layout.r_dim()) {
        r = linalg::sym_basis(m, k);
      } else if (k < s.layout.r_dim() + s.layout.hq_dim()) {
        h = linalg::sym_basis(n, k - s.layout.r_dim());
      } else {
        q = linalg::sym_basis(n, k - s.layout.r_dim() - s.layout.hq_dim());
      }
      s.Phi.block(row, k, rows, 1) = vec(coeffs.identity_residual(i, h, q, r));
    }

    const Lemma4Block& blk = coeffs.blocks[i - 1];
    for (int c = 0; c < i; ++c) {
      s.Phi_replicated.block(row, c * m * m, rows, m * m) =
          kron(blk.b.middleRows(c * m, m).transpose(), blk.a.middleCols(c * m, m));
    }
    const int h_col = t_win * m * m;
    s.Phi_replicated.block(row, h_col, rows, n * n) =
        -kron(blk.d.topRows(n).transpose(), blk.c.leftCols(n));
    for (int c = 1; c < i; ++c) {
      s.Phi_replicated.block(row, h_col + c * n * n, rows, n * n) =
          -kron(blk.d.middleRows(c * n, n).transpose(), blk.c.middleCols(c * n, n));
    }
  }
  return s;
}

const char* to_string(Feasibility f) {
  return f == Feasibility::kExactFeasible ? "exact-feasible" : "infeasible";
}

FeasibilityReport feasibility_test(const StackedIdentificationSystem& sysmat) {
  const int n = sysmat.layout.n;
  const int m = sysmat.layout.m;
  FeasibilityReport rep;
  Eigen::JacobiSVD<MatrixXd> svd(sysmat.Phi);
  const VectorXd sv = svd.singularValues();
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());
  rep.reduced_rank = linalg::numeric_rank(sysmat.Phi, kStackedRankTolerance);
  rep.replicated_rank = linalg::numeric_rank(sysmat.Phi_replicated, kStackedRankTolerance);
  rep.reduced_unknowns = sysmat.layout.size();
  rep.full_matrix_threshold = n * n + n + (m * m + m) / 2;
  rep.decision = rep.reduced_rank < rep.reduced_unknowns ? Feasibility::kExactFeasible
                                                         : Feasibility::kInfeasible;
  return rep;
}

IdentifiabilityReport check_identifiability(const LinearSystem& sys, const GainSequence& gains,
                                            bool diagonal_weights) {
  sys.check_dimensions();
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int big_n = gains.horizon();
  require(big_n >= 1, ErrorCode::kPrecondition, "need at least one gain");

  // Parameter bases: R^{-1} coordinates, then [Q; H] coordinates.
  std::vector<MatrixXd> r_basis, q_basis;
  if (diagonal_weights) {
    for (int a = 0; a < m; ++a) {
      MatrixXd e = MatrixXd::Zero(m, m);
      e(a, a) = 1.0;
      r_basis.push_back(e);
    }
    for (int a = 0; a < n; ++a) {
      MatrixXd e = MatrixXd::Zero(n, n);
      e(a, a) = 1.0;
      q_basis.push_back(e);
    }
  } else {
    for (int a = 0; a < linalg::sym_dim(m); ++a) r_basis.push_back(linalg::sym_basis(m, a));
    for (int a = 0; a < linalg::sym_dim(n); ++a) q_basis.push_back(linalg::sym_basis(n, a));
  }
  const int nr = static_cast<int>(r_basis.size());
  const int nq = static_cast<int>(q_basis.size());
  const int cols = 2 * nq;  // Q coordinates then H coordinates

  // P_i for each (Q, H) basis element; P_N = H, P_i = Q + A' P_{i+1} A^c_i.
  std::vector<MatrixXd> p(cols);
  for (int b = 0; b < cols; ++b) p[b] = b < nq ? MatrixXd::Zero(n, n) : q_basis[b - nq];
  const MatrixXd bt = sys.B.transpose();
  MatrixXd rows(big_n, nr * cols);
  for (int i = big_n; i >= 1; --i) {
    if (i < big_n) {
      const MatrixXd ac = sys.A - sys.B * gains[i];
      for (int b = 0; b < cols; ++b) {
        p[b] = sys.A.transpose() * p[b] * ac;
        if (b < nq) p[b] += q_basis[b];
      }
    }
    VectorXd v(nr * cols);
    for (int b = 0; b < cols; ++b) {
      const MatrixXd lin = (m == n) ? MatrixXd(bt * p[b]) : MatrixXd(bt * p[b] * sys.B);
      for (int a = 0; a < nr; ++a) v(b * nr + a) = (r_basis[a] * lin).trace();
    }
    const double norm = v.norm();
    rows.row(big_n - i) = norm > 0.0 ? VectorXd(v / norm).transpose() : v.transpose();
  }

  IdentifiabilityReport rep;
  rep.count = linalg::numeric_rank(rows, kStackedRankTolerance);
  rep.threshold = diagonal_weights ? 2 * n * m : m * n * (n + 1) * (m + 1) / 2;
  rep.identifiable = rep.count >= rep.threshold;
  return rep;
}

const char* to_string(Problem2Mode m) {
  switch (m) {
    case Problem2Mode::kExactNullspace: return "exact-nullspace";
    case Problem2Mode::kQpFallback: return "qp-fallback";
    case Problem2Mode::kMinCondition: return "min-condition";
  }
  return "unknown";
}

namespace {

void normalize(Problem2Result& res) {
  if (res.H.trace() + res.R.trace() < 0.0) {
    res.H = -res.H;
    res.Q = -res.Q;
    res.R = -res.R;
  }
  require(linalg::is_positive_definite(res.H), ErrorCode::kIndefinite,
          "recovered H is not positive definite; gain estimates too noisy");
  require(linalg::is_positive_definite(res.R), ErrorCode::kIndefinite,
          "recovered R is not positive definite; gain estimates too noisy");
  const double h_min = linalg::min_eigenvalue(res.H);
  const double r_min = linalg::min_eigenvalue(res.R);
  const double q_min = linalg::min_eigenvalue(res.Q);
  const double top = std::max({linalg::max_eigenvalue(res.H), linalg::max_eigenvalue(res.R),
                               linalg::max_eigenvalue(res.Q)});
  double lo = std::min(h_min, r_min);
  if (q_min > 1e-6 * top) {
    lo = std::min(lo, q_min);
    res.scale_note = "scaled so that the smallest eigenvalue of diag(H, Q, R) is 1";
  } else {
    res.scale_note =
        "Q numerically zero or indefinite; scaled so that the smallest eigenvalue of diag(H, R) is 1";
  }
  const double s = 1.0 / lo;
  res.H = linalg::symmetrize(s * res.H);
  res.Q = linalg::symmetrize(s * res.Q);
  res.R = linalg::symmetrize(s * res.R);
  res.tau = s * top;
}

// Ratio of the smallest to the largest eigenvalue over the diagonal blocks,
// after flipping the sign so the trace of H and R is positive. Positive iff
// every block is PD; its inverse is the condition number.
struct ConditionFamily {
  const WeightLayout* layout;
  MatrixXd basis;  // p x d
  bool with_q;

  VectorXd theta(const VectorXd& c) const {
    VectorXd t = basis * c;
    const double nrm = t.norm();
    return nrm > 0.0 ? VectorXd(t / nrm) : t;
  }

  double inverse_condition(const VectorXd& c) const {
    MatrixXd h, q, r;
    layout->unpack(theta(c), h, q, r);
    if (h.trace() + r.trace() < 0.0) {
      h = -h;
      q = -q;
      r = -r;
    }
    double lo = std::min(linalg::min_eigenvalue(h), linalg::min_eigenvalue(r));
    double hi = std::max(linalg::max_eigenvalue(h), linalg::max_eigenvalue(r));
    if (with_q) {
      lo = std::min(lo, linalg::min_eigenvalue(q));
      hi = std::max(hi, linalg::max_eigenvalue(q));
    }
    return hi > 0.0 ? lo / hi : -1.0;
  }
};

double negated_inverse_condition(const gsl_vector* x, void* params) {
  const auto* fam = static_cast<const ConditionFamily*>(params);
  VectorXd c(static_cast<Eigen::Index>(x->size));
  for (std::size_t i = 0; i < x->size; ++i) c(static_cast<Eigen::Index>(i)) = gsl_vector_get(x, i);
  if (c.norm() == 0.0) return 1.0;
  return -fam->inverse_condition(c);
}

// Simplex search from one start; returns the best point found.
VectorXd nelder_mead(const ConditionFamily& fam, const VectorXd& start, double* value) {
  const std::size_t d = static_cast<std::size_t>(start.size());
  gsl_multimin_function f{&negated_inverse_condition, d, const_cast<ConditionFamily*>(&fam)};
  gsl_vector* x = gsl_vector_alloc(d);
  gsl_vector* step = gsl_vector_alloc(d);
  for (std::size_t i = 0; i < d; ++i) gsl_vector_set(x, i, start(static_cast<Eigen::Index>(i)));
  gsl_vector_set_all(step, 0.3);
  gsl_multimin_fminimizer* mm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d);
  gsl_multimin_fminimizer_set(mm, &f, x, step);
  for (int it = 0; it < 200 * static_cast<int>(d) + 500; ++it) {
    if (gsl_multimin_fminimizer_iterate(mm) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(mm), 1e-12) == GSL_SUCCESS) break;
  }
  VectorXd best(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) best(static_cast<Eigen::Index>(i)) = gsl_vector_get(mm->x, i);
  *value = mm->fval;
  gsl_multimin_fminimizer_free(mm);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

VectorXd best_conditioned(const WeightLayout& lay, const MatrixXd& basis) {
  MatrixXd hb, qb, rb;
  double q_mass = 0.0;
  for (int j = 0; j < basis.cols(); ++j) {
    lay.unpack(basis.col(j), hb, qb, rb);
    q_mass = std::max(q_mass, qb.norm());
  }
  const ConditionFamily fam{&lay, basis, q_mass > 1e-8};
  const int d = static_cast<int>(basis.cols());
  VectorXd best = VectorXd::Unit(d, 0);
  double best_val = 1.0;
  // Restarts: the diagonal and the first few coordinate axes, then a polish
  // from the winner.
  const int axes = std::min(d, 4);
  for (int s = 0; s <= axes; ++s) {
    VectorXd start = s < axes ? VectorXd(VectorXd::Unit(d, s)) : VectorXd(VectorXd::Ones(d) / std::sqrt(d));
    double val = 0.0;
    VectorXd c = nelder_mead(fam, start, &val);
    if (val < best_val) {
      best_val = val;
      best = c / c.norm();
    }
  }
  double val = 0.0;
  VectorXd c = nelder_mead(fam, best, &val);
  if (val < best_val) best = c / c.norm();
  return fam.theta(best);
}

}  // namespace

Problem2Result solve_problem2(const StackedIdentificationSystem& sysmat, Problem2Mode mode) {
  const WeightLayout& lay = sysmat.layout;
  const int p = lay.size();
  Problem2Result res;
  res.mode = mode;
  VectorXd theta;
  if (mode == Problem2Mode::kExactNullspace) {
    Eigen::JacobiSVD<MatrixXd> svd(sysmat.Phi, Eigen::ComputeFullV);
    const int rank = linalg::numeric_rank(sysmat.Phi, kStackedRankTolerance);
    res.null_dim = p - rank;
    require(res.null_dim == 1, ErrorCode::kAmbiguous,
            "structured null space has dimension " + std::to_string(res.null_dim));
    theta = svd.matrixV().col(p - 1);
    res.objective = (sysmat.Phi * theta).squaredNorm();
  } else if (mode == Problem2Mode::kMinCondition) {
    Eigen::JacobiSVD<MatrixXd> svd(sysmat.Phi, Eigen::ComputeFullV);
    const int rank = linalg::numeric_rank(sysmat.Phi, kStackedRankTolerance);
    res.null_dim = p - rank;
    require(res.null_dim >= 1, ErrorCode::kPrecondition, "Phi has no null space");
    const MatrixXd basis = svd.matrixV().rightCols(res.null_dim);
    theta = res.null_dim == 1 ? VectorXd(basis.col(0)) : best_conditioned(lay, basis);
    res.objective = (sysmat.Phi * theta).squaredNorm();
  } else {
    const double t = static_cast<double>(sysmat.window);
    VectorXd w(p);
    w.head(lay.r_dim()).setConstant(t);
    w.segment(lay.r_dim(), lay.hq_dim()).setConstant(1.0);
    w.tail(lay.hq_dim()).setConstant(std::max(t - 1.0, 1.0));
    const VectorXd w_isqrt = w.cwiseSqrt().cwiseInverse();
    const MatrixXd scaled = sysmat.Phi * w_isqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(scaled.transpose() * scaled);
    // A cluster of small eigenvalues split from the rest by a wide gap is a
    // noisy version of a multi-dimensional null space; pick in it as
    // MinCondition does.
    const VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    int cluster = 1;
    for (int k = 1; k <= p / 2; ++k) {
      if (ev(k - 1) < kNearNullGap * ev(k)) {
        cluster = k;
        break;
      }
    }
    if (cluster > 1) {
      const MatrixXd basis = w_isqrt.asDiagonal() * es.eigenvectors().leftCols(cluster);
      theta = best_conditioned(lay, basis);
      res.null_dim = cluster;
    } else {
      theta = w_isqrt.asDiagonal() * es.eigenvectors().col(0);
    }
    res.objective = es.eigenvalues()(0);
  }
  lay.unpack(theta, res.H, res.Q, res.R);
  normalize(res);
  return res;
}

double scale_matched_error(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r,
                           const MatrixXd& h0, const MatrixXd& q0, const MatrixXd& r0,
                           double* alpha_out) {
  VectorXd est(h.size() + q.size() + r.size());
  VectorXd ref(h0.size() + q0.size() + r0.size());
  require(est.size() == ref.size(), ErrorCode::kStructural, "weight dimensions differ");
  est << vec(h), vec(q), vec(r);
  ref << vec(h0), vec(q0), vec(r0);
  const double alpha = est.dot(ref) / ref.squaredNorm();
  if (alpha_out) *alpha_out = alpha;
  return (est - alpha * ref).norm() / (alpha * ref).norm();
}

}  // namespace lqr_recon
