#pragma once

// Inverse problem for the classic objective: recover (H, Q, R) up to a common
// scale from a gain sequence that ends at the final step.

#include <string>
#include <vector>

#include "lqr_recon/model.hpp"

namespace lqr_recon {

/// Coefficients of the identities
///   a_i (I_i (x) R) b_i = c_i diag(H, I_{i-1} (x) Q) d_i,  i = 1..T,
/// which restate R K_{N-i} = B' P_{N-i+1} A^c_{N-i} with P unrolled to H.
/// Shapes: a_i m x im, b_i im x n, c_i m x in, d_i in x n.
struct Lemma4Block {
  MatrixXd a, b, c, d;
};

struct Lemma4Coefficients {
  int state_dim = 0;
  int input_dim = 0;
  std::vector<Lemma4Block> blocks;  // blocks[i-1] for i = 1..T

  int window() const { return static_cast<int>(blocks.size()); }
  /// Left minus right side of identity i for given weights (m x n).
  MatrixXd identity_residual(int i, const MatrixXd& h, const MatrixXd& q, const MatrixXd& r) const;
};

/// `gains` holds K_{N-T}..K_{N-1}, the last T gains in time order.
Lemma4Coefficients build_lemma4(const LinearSystem& sys, const std::vector<MatrixXd>& gains);

/// Free parameters theta = [coords(R); coords(H); coords(Q)] in the
/// sqrt(2)-weighted upper-triangle coordinates.
struct WeightLayout {
  int n = 0;
  int m = 0;
  int r_dim() const;
  int hq_dim() const;
  int size() const;
  VectorXd pack(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r) const;
  void unpack(const VectorXd& theta, MatrixXd& h, MatrixXd& q, MatrixXd& r) const;
};

struct StackedIdentificationSystem {
  WeightLayout layout;
  int window = 0;
  /// Rows vec(identity i), columns the structured parameters theta.
  MatrixXd Phi;
  /// Replicated form: columns [1_T (x) vec R; vec H; 1_{T-1} (x) vec Q] with
  /// every copy a separate unknown; kept for rank reporting.
  MatrixXd Phi_replicated;

  /// Theta_T(H, Q, R) for the replicated form.
  VectorXd replicated_theta(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r) const;
};

StackedIdentificationSystem build_stacked_system(const Lemma4Coefficients& coeffs);

enum class Feasibility { kExactFeasible, kInfeasible };

const char* to_string(Feasibility f);

/// Singular values below this times the largest count as zero.
inline constexpr double kStackedRankTolerance = 1e-8;
/// Singular-value ratio that separates a near-null cluster in the QP fallback.
inline constexpr double kNearNullGap = 1e-2;

struct FeasibilityReport {
  Feasibility decision = Feasibility::kInfeasible;
  int reduced_rank = 0;       // rank of Phi on the structured parameters
  int reduced_unknowns = 0;   // n(n+1) + m(m+1)/2
  int replicated_rank = 0;    // rank of Phi_replicated
  int full_matrix_threshold = 0;  // n^2 + n + (m^2+m)/2
  std::vector<double> singular_values;  // of Phi, descending
};

/// ExactFeasible iff the reduced rank is below the number of structured unknowns.
FeasibilityReport feasibility_test(const StackedIdentificationSystem& sysmat);

struct IdentifiabilityReport {
  int count = 0;       // independent vec(P_i) found
  int threshold = 0;   // mn(n+1)(m+1)/2, or 2nm in diagonal mode
  bool identifiable = false;
};

/// Builds, for every i = 1..N of the gain sequence, the bilinear form
/// (R^{-1}, (Q, H)) -> tr(R^{-1} B' P_i) with P_N = H,
/// P_i = Q + A' P_{i+1} A^c_i, in reduced symmetric coordinates, and counts
/// linearly independent vectorizations. For m != n the form uses
/// tr(R^{-1} B' P_i B). Diagonal mode restricts every weight to its diagonal.
IdentifiabilityReport check_identifiability(const LinearSystem& sys, const GainSequence& gains,
                                            bool diagonal_weights = false);

enum class Problem2Mode { kExactNullspace, kQpFallback, kMinCondition };

const char* to_string(Problem2Mode m);

struct Problem2Result {
  MatrixXd H, Q, R;
  double tau = 0.0;            // condition number of diag(H, Q, R) after scaling
  std::string scale_note;
  Problem2Mode mode = Problem2Mode::kExactNullspace;
  int null_dim = 0;            // ExactNullspace and MinCondition
  double objective = 0.0;      // ||Phi theta||^2 at the unit-norm solution
};

/// ExactNullspace: the single null vector of Phi. QpFallback: minimizes
/// ||Phi theta||^2 over ||Theta_T||^2 = T||R||^2 + ||H||^2 + (T-1)||Q||^2 = 1
/// (Q weight floored at 1 for T = 1); if the smallest singular values form a
/// cluster of at most half the unknowns, split from the rest by a ratio below
/// kNearNullGap, the best-conditioned member of the cluster's span is taken
/// instead. All modes then flip the sign so H is PD and
/// scale so the smallest eigenvalue of diag(H, Q, R) is 1; when Q is
/// numerically zero its block is left out of that minimum.
/// MinCondition: when the null space of Phi has dimension > 1, the member of
/// it with the smallest condition number of diag(H, Q, R) (Nelder-Mead over
/// the null-space coordinates); Q joins the blocks only if the null space
/// carries a nonzero Q.
Problem2Result solve_problem2(const StackedIdentificationSystem& sysmat, Problem2Mode mode);

/// Relative Frobenius distance of [H Q R] to alpha [H0 Q0 R0] with alpha
/// the least-squares scale; alpha is returned through `alpha_out` if set.
double scale_matched_error(const MatrixXd& h, const MatrixXd& q, const MatrixXd& r,
                           const MatrixXd& h0, const MatrixXd& q0, const MatrixXd& r0,
                           double* alpha_out = nullptr);

}  // namespace lqr_recon
