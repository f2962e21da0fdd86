#pragma once

// Small dense linear-algebra helpers used across modules.

#include <Eigen/Dense>

namespace lqr_recon::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Singular values below rel_tol * sigma_max count as zero.
int numeric_rank(const MatrixXd& m, double rel_tol);

double min_singular_value(const MatrixXd& m);
double spectral_radius(const MatrixXd& m);
double min_eigenvalue(const MatrixXd& sym);
double max_eigenvalue(const MatrixXd& sym);
bool is_positive_definite(const MatrixXd& sym);
bool is_positive_semidefinite(const MatrixXd& sym, double tol);

/// Moore-Penrose pseudo-inverse via complete orthogonal decomposition.
MatrixXd pinv(const MatrixXd& m);

/// Solves S X = rhs for symmetric positive-definite S; throws kNumerical
/// when the factorization fails.
MatrixXd spd_solve(const MatrixXd& s, const MatrixXd& rhs, const char* what);

/// Inverse square root of an SPD matrix.
MatrixXd inv_sqrt_spd(const MatrixXd& sym);

/// Controllability matrix [B, AB, ..., A^{n-1}B].
MatrixXd controllability_matrix(const MatrixXd& a, const MatrixXd& b);

/// Symmetric matrices <-> upper-triangle coordinates. Off-diagonal
/// coordinates carry a sqrt(2) weight so the Euclidean norm of the
/// coordinates equals the Frobenius norm of the matrix.
int sym_dim(int k);
VectorXd sym_to_coords(const MatrixXd& s);
MatrixXd coords_to_sym(const VectorXd& v, int k);
/// Basis matrix for coordinate idx of sym_to_coords.
MatrixXd sym_basis(int k, int idx);

}  // namespace lqr_recon::linalg
