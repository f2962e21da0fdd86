#include <gtest/gtest.h>

#include "lqr_recon/error.hpp"
#include "lqr_recon/linalg.hpp"
#include "lqr_recon/model.hpp"
#include "oracles.hpp"

namespace lqr_recon {
namespace {

using testing::reference_system;

LinearSystem identity_plant() {
  LinearSystem sys;
  sys.A = MatrixXd::Identity(2, 2);
  sys.B = 0.2 * MatrixXd::Identity(2, 2);
  sys.C = MatrixXd::Identity(2, 2);
  sys.noise_std = VectorXd::Zero(2);
  return sys;
}

TEST(ValidateSystem, PlanarPlantPasses) {
  const ValidationReport v = validate_system(identity_plant());
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.b_rank, 2);
  EXPECT_EQ(v.controllability_rank, 2);
}

TEST(ValidateSystem, ZeroInputMatrixFails) {
  LinearSystem sys = identity_plant();
  sys.B.setZero();
  const ValidationReport v = validate_system(sys);
  EXPECT_FALSE(v.passed());
  EXPECT_FALSE(v.b_full_column_rank);
  EXPECT_FALSE(v.controllable);
}

TEST(ValidateSystem, ReferencePlantPasses) {
  const ValidationReport v = validate_system(reference_system(0.02));
  EXPECT_TRUE(v.passed());
  EXPECT_GT(v.a_min_sv, 0.0);
  EXPECT_GT(v.controllability_min_sv, 0.0);
}

TEST(ValidateSystem, RankDeficientBRejectedForRandomPlants) {
  GaussianRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    LinearSystem sys = testing::random_system(rng, 4, 3);
    sys.B.col(2) = 0.5 * sys.B.col(0) - 2.0 * sys.B.col(1);
    EXPECT_FALSE(validate_system(sys).b_full_column_rank);
  }
}

TEST(ValidateSystem, SingularAAndCFlagged) {
  LinearSystem sys = identity_plant();
  sys.A(1, 1) = 0.0;
  sys.C(0, 0) = 0.0;
  const ValidationReport v = validate_system(sys);
  EXPECT_FALSE(v.a_invertible);
  EXPECT_FALSE(v.c_invertible);
}

TEST(ValidateSystem, NegativeNoiseFlagged) {
  LinearSystem sys = identity_plant();
  sys.noise_std(0) = -1.0;
  EXPECT_FALSE(validate_system(sys).noise_nonnegative);
}

TEST(ValidateSystem, DimensionMismatchIsStructural) {
  LinearSystem sys = identity_plant();
  sys.B = MatrixXd::Identity(3, 2);
  try {
    validate_system(sys);
    FAIL() << "expected a structural error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStructural);
  }
}

TEST(ValidateSystem, NonSquareOutputMapRejected) {
  LinearSystem sys = identity_plant();
  sys.C = MatrixXd::Identity(3, 2);
  sys.noise_std = VectorXd::Zero(3);
  EXPECT_THROW(sys.check_dimensions(), Error);
}

TEST(ErrorCoordinates, Examples) {
  const Eigen::Vector3d xt(6, 8, 4);
  EXPECT_EQ(to_error_coordinates(xt, xt), VectorXd::Zero(3));
  EXPECT_EQ(to_error_coordinates(VectorXd::Zero(3), xt), VectorXd(-xt));
  GaussianRng rng(3);
  for (int i = 0; i < 10; ++i) {
    const VectorXd a = rng.normal_vector(5), b = rng.normal_vector(5);
    EXPECT_EQ(to_error_coordinates(a, b), VectorXd(a - b));
    EXPECT_EQ(to_error_coordinates(a, a), VectorXd::Zero(5));
  }
}

TEST(Objective, FinalStateOnlyShape) {
  const LQRObjective o = LQRObjective::final_state_only(2.0 * MatrixXd::Identity(2, 2), 3);
  EXPECT_EQ(o.H, MatrixXd::Identity(3, 3));
  EXPECT_EQ(o.Q, MatrixXd::Zero(3, 3));
  EXPECT_EQ(o.setting, Setting::kFinalStateOnly);
  EXPECT_NO_THROW(o.check(3, 2));
}

TEST(Objective, IndefiniteWeightsRejected) {
  LQRObjective o = LQRObjective::classic(MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2),
                                         MatrixXd::Identity(2, 2));
  o.R(1, 1) = -1.0;
  try {
    o.check(2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
  o = LQRObjective::classic(MatrixXd::Identity(2, 2), -MatrixXd::Identity(2, 2),
                            MatrixXd::Identity(2, 2));
  EXPECT_THROW(o.check(2, 2), Error);
}

TEST(Objective, ScaledMultipliesAllWeights) {
  const LQRObjective o = LQRObjective::classic(MatrixXd::Identity(2, 2), 0.1 * MatrixXd::Identity(2, 2),
                                               0.5 * MatrixXd::Identity(2, 2));
  const LQRObjective s = o.scaled(5.0);
  EXPECT_TRUE(s.H.isApprox(5.0 * o.H));
  EXPECT_TRUE(s.Q.isApprox(5.0 * o.Q));
  EXPECT_TRUE(s.R.isApprox(5.0 * o.R));
}

TEST(ProblemSpec, HorizonMustBePositive) {
  LQRProblemSpec spec{identity_plant(),
                      LQRObjective::final_state_only(MatrixXd::Identity(2, 2), 2), 0,
                      VectorXd::Zero(2), VectorXd::Zero(2)};
  EXPECT_THROW(spec.check(), Error);
  spec.horizon = 1;
  EXPECT_NO_THROW(spec.check());
}

TEST(Trajectory, SuffixAndSets) {
  Trajectory t;
  for (int k = 0; k <= 5; ++k) t.outputs.push_back(VectorXd::Constant(2, k));
  t.contains_final_state = true;
  const Trajectory s = t.suffix(2);
  ASSERT_EQ(s.length(), 2);
  EXPECT_EQ(s.outputs.front()(0), 3.0);
  EXPECT_TRUE(s.contains_final_state);
  TrajectorySet set{{t, s}};
  EXPECT_EQ(set.min_length(), 2);
  EXPECT_TRUE(set.all_contain_final_state());
  const TrajectorySet sh = set.shifted(2.0 * MatrixXd::Identity(2, 2), VectorXd::Ones(2));
  EXPECT_EQ(sh.trajectories[0].outputs[0], VectorXd::Constant(2, -2.0));
}

TEST(SymCoords, NormMatchesFrobeniusAndRoundTrips) {
  GaussianRng rng(5);
  for (int k = 1; k <= 5; ++k) {
    const MatrixXd g = rng.normal_matrix(k, k);
    const MatrixXd s = g + g.transpose();
    const VectorXd v = linalg::sym_to_coords(s);
    EXPECT_EQ(v.size(), linalg::sym_dim(k));
    EXPECT_NEAR(v.norm(), s.norm(), 1e-12);
    EXPECT_TRUE(linalg::coords_to_sym(v, k).isApprox(s, 1e-14));
  }
}

TEST(Rng, SameSeedSameStream) {
  GaussianRng a(42), b(42), c(43);
  const VectorXd va = a.normal_vector(100), vb = b.normal_vector(100), vc = c.normal_vector(100);
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
}

TEST(Rng, MomentsAreStandardNormal) {
  GaussianRng rng(7);
  const VectorXd v = rng.normal_vector(200000);
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
}

}  // namespace
}  // namespace lqr_recon
