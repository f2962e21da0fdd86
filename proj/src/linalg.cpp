#include "lqr_recon/linalg.hpp"

#include <cmath>
#include <string>

#include "lqr_recon/error.hpp"

namespace lqr_recon::linalg {

int numeric_rank(const MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++rank;
  }
  return rank;
}

double min_singular_value(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return std::min(m.rows(), m.cols()) == 0 ? 0.0 : s(s.size() - 1);
}

double spectral_radius(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(sym), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

bool is_positive_definite(const MatrixXd& sym) {
  Eigen::LLT<MatrixXd> llt(symmetrize(sym));
  return llt.info() == Eigen::Success && min_eigenvalue(sym) > 0.0;
}

bool is_positive_semidefinite(const MatrixXd& sym, double tol) {
  return min_eigenvalue(sym) >= -tol;
}

MatrixXd pinv(const MatrixXd& m) {
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(m);
  return cod.pseudoInverse();
}

MatrixXd spd_solve(const MatrixXd& s, const MatrixXd& rhs, const char* what) {
  Eigen::LLT<MatrixXd> llt(symmetrize(s));
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kNumerical, std::string(what) + ": matrix is not positive definite");
  }
  return llt.solve(rhs);
}

MatrixXd inv_sqrt_spd(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(sym));
  if (es.eigenvalues().minCoeff() <= 0.0) {
    fail(ErrorCode::kNumerical, "inverse square root of a non-PD matrix");
  }
  return es.operatorInverseSqrt();
}

MatrixXd controllability_matrix(const MatrixXd& a, const MatrixXd& b) {
  const auto n = a.rows();
  MatrixXd ctrb(n, n * b.cols());
  MatrixXd block = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    ctrb.middleCols(i * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return ctrb;
}

int sym_dim(int k) { return k * (k + 1) / 2; }

VectorXd sym_to_coords(const MatrixXd& s) {
  const int k = static_cast<int>(s.rows());
  VectorXd v(sym_dim(k));
  int idx = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      v(idx++) = (i == j) ? s(i, i) : std::sqrt(2.0) * 0.5 * (s(i, j) + s(j, i));
    }
  }
  return v;
}

MatrixXd coords_to_sym(const VectorXd& v, int k) {
  MatrixXd s(k, k);
  int idx = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      if (i == j) {
        s(i, i) = v(idx++);
      } else {
        s(i, j) = s(j, i) = v(idx++) / std::sqrt(2.0);
      }
    }
  }
  return s;
}

MatrixXd sym_basis(int k, int idx) {
  VectorXd e = VectorXd::Zero(sym_dim(k));
  e(idx) = 1.0;
  return coords_to_sym(e, k);
}

}  // namespace lqr_recon::linalg
