#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "lqr_recon/error.hpp"
#include "lqr_recon/estimation.hpp"
#include "lqr_recon/io.hpp"
#include "lqr_recon/linalg.hpp"
#include "lqr_recon/lqr_forward.hpp"
#include "oracles.hpp"

namespace lqr_recon {
namespace {

using testing::reference_system;

LQRObjective reference_classic() {
  Eigen::Vector3d r(0.4, 0.4, 0.8);
  return LQRObjective::classic(MatrixXd::Identity(3, 3), 0.2 * MatrixXd::Identity(3, 3),
                               r.asDiagonal().toDenseMatrix());
}

DatasetConfig load_config(const char* name) {
  return dataset_config_from_json(read_text_file(std::string(LQRR_CONFIG_DIR) + "/" + name));
}

Trajectory line(const VectorXd& through, const VectorXd& dir, int points) {
  Trajectory t;
  for (int k = 0; k < points; ++k) t.outputs.push_back(through + (3.0 - k) * dir);
  return t;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: nothing thrown
}

TEST(Target, ExactLinesIntersectAtTarget) {
  const LinearSystem sys = reference_system(0.0);
  const Eigen::Vector3d xt(6, 8, 4);
  TrajectorySet data{{line(xt, Eigen::Vector3d(1, 2, -1), 6), line(xt, Eigen::Vector3d(-1, 0.5, 2), 6)}};
  const TargetEstimate est = estimate_target(sys, data, TargetMethod::kLineIntersection);
  EXPECT_LT((est.target - xt).norm(), 1e-10);
  EXPECT_LT(est.gap, 1e-10);
}

TEST(Target, LineIntersectionMatchesClosedFormMidpoint) {
  const LinearSystem sys = reference_system(0.3);
  const Eigen::Vector3d p1(0, 0, 0), d1(1, 0, 0), p2(0, 1, 0.5), d2(0, 0, 1);
  TrajectorySet data{{line(p1, d1, 5), line(p2, d2, 5)}};
  TargetOptions opt;
  opt.gap_tolerance = 10.0;
  const TargetEstimate est = estimate_target(sys, data, TargetMethod::kLineIntersection, opt);
  EXPECT_LT((est.target - testing::line_midpoint(p1, d1, p2, d2)).norm(), 1e-10);
  EXPECT_NEAR(est.gap, 1.0, 1e-10);
}

TEST(Target, SkewLinesBeyondToleranceRejected) {
  const LinearSystem sys = reference_system(0.0);
  TrajectorySet data{{line(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), 5),
                      line(Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1), 5)}};
  EXPECT_EQ(code_of([&] { estimate_target(sys, data, TargetMethod::kLineIntersection); }),
            ErrorCode::kDegenerateGeometry);
}

TEST(Target, ParallelLinesAreDegenerate) {
  const LinearSystem sys = reference_system(0.0);
  const Eigen::Vector3d d(1, 1, 0);
  TrajectorySet data{{line(Eigen::Vector3d(0, 0, 0), d, 5), line(Eigen::Vector3d(0, 0, 1), d, 5)}};
  EXPECT_EQ(code_of([&] { estimate_target(sys, data, TargetMethod::kLineIntersection); }),
            ErrorCode::kDegenerateGeometry);
  TrajectorySet single{{line(Eigen::Vector3d(0, 0, 0), d, 5)}};
  EXPECT_EQ(code_of([&] { estimate_target(sys, single, TargetMethod::kLineIntersection); }),
            ErrorCode::kDegenerateGeometry);
}

TEST(Target, FinalStateAverage) {
  LinearSystem sys = reference_system(0.0);
  sys.C << 2, 0, 0, 0, 1, 1, 0, 0, 1;
  const Eigen::Vector3d xt(6, 8, 4);
  TrajectorySet data;
  GaussianRng rng(1);
  for (int j = 0; j < 4; ++j) {
    Trajectory t;
    t.outputs = {rng.normal_vector(3), sys.C * xt};
    t.contains_final_state = true;
    data.trajectories.push_back(t);
  }
  EXPECT_LT((estimate_target(sys, data, TargetMethod::kFinalStateAverage).target - xt).norm(), 1e-12);
  data.trajectories[2].contains_final_state = false;
  EXPECT_EQ(code_of([&] { estimate_target(sys, data, TargetMethod::kFinalStateAverage); }),
            ErrorCode::kPrecondition);
}

TEST(Target, ReferenceSetupProbesLandNearTarget) {
  DatasetConfig cfg = load_config("final_state.json");
  int close = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    const Dataset d = generate_dataset(cfg, static_cast<std::uint64_t>(seed));
    ASSERT_EQ(d.probes.size(), 2u);
    const TargetEstimate est = estimate_target(d.config.spec.system, d.probes, TargetMethod::kLineIntersection);
    if ((est.target - cfg.spec.target).norm() < 0.15) ++close;
  }
  EXPECT_GE(close, 9);
}

TEST(Filter, ZeroInputTrajectory) {
  const LinearSystem sys = reference_system(0.0);
  Trajectory t;
  VectorXd x = Eigen::Vector3d(1, -2, 0.5);
  for (int k = 0; k <= 6; ++k) {
    t.outputs.push_back(sys.C * x);
    x = sys.A * x;
  }
  const FilterResult f = reconstruct_inputs_states(sys, t);
  ASSERT_EQ(f.inputs.size(), 6u);
  ASSERT_EQ(f.states.size(), 7u);
  for (const auto& u : f.inputs) EXPECT_LT(u.norm(), 1e-9);
}

TEST(Filter, NoiselessLqrTrajectoryRecoversInputsAndStates) {
  LinearSystem sys = reference_system(0.0);
  sys.C << 1, 0.2, 0, 0, 1, 0, 0.1, 0, 1;
  LQRProblemSpec spec{sys, reference_classic(), 12, VectorXd::Zero(3), Eigen::Vector3d(5, -3, 2)};
  const SimulationResult sim = simulate(spec, riccati_gains(spec).gains, 1);
  const FilterResult f = reconstruct_inputs_states(sys, sim.observed());
  EXPECT_LT(testing::max_abs_diff(f.inputs, sim.inputs), 1e-8);
  EXPECT_LT(testing::max_abs_diff(f.states, sim.states), 1e-8);
}

TEST(Filter, NoisyStateErrorBounded) {
  const double sigma = 0.02;
  const LinearSystem sys = reference_system(sigma);
  LQRProblemSpec spec{sys, reference_classic(), 12, VectorXd::Zero(3), Eigen::Vector3d(5, -3, 2)};
  const GainSequence g = riccati_gains(spec).gains;
  double total = 0.0;
  int count = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const SimulationResult sim = simulate(spec, g, static_cast<std::uint64_t>(seed));
    const FilterResult f = reconstruct_inputs_states(sys, sim.observed());
    for (std::size_t k = 0; k < f.states.size(); ++k, ++count) total += (f.states[k] - sim.states[k]).norm();
  }
  const double cinv = sys.C.inverse().norm();
  EXPECT_LT(total / count, 5.0 * sigma * cinv);
}

TEST(Filter, RankDeficientInputMapRejected) {
  LinearSystem sys = reference_system(0.0);
  sys.B.col(2) = sys.B.col(0);
  Trajectory t;
  t.outputs = {VectorXd::Zero(3), VectorXd::Zero(3)};
  EXPECT_EQ(code_of([&] { reconstruct_inputs_states(sys, t); }), ErrorCode::kRankDeficient);
}

TEST(Kalman, NoiselessIsExact) {
  const LinearSystem sys = reference_system(0.0);
  LQRProblemSpec spec{sys, reference_classic(), 20, VectorXd::Zero(3), Eigen::Vector3d(5, -3, 2)};
  const GainSequence g = riccati_gains(spec).gains;
  const SimulationResult sim = simulate(spec, g, 1);
  Trajectory obs;
  obs.outputs.assign(sim.outputs.begin(), sim.outputs.begin() + 16);
  const KalmanResult kf = kalman_state(sys, g.gains, obs);
  EXPECT_LT((kf.state - sim.states[15]).norm(), 1e-9);
}

TEST(Kalman, BeatsRawInversion) {
  const LinearSystem sys = reference_system(0.02);
  LQRProblemSpec spec{sys, reference_classic(), 20, VectorXd::Zero(3), Eigen::Vector3d(5, -3, 2)};
  const GainSequence g = riccati_gains(spec).gains;
  const MatrixXd cinv = sys.C.inverse();
  int wins = 0;
  for (int seed = 0; seed < 200; ++seed) {
    const SimulationResult sim = simulate(spec, g, static_cast<std::uint64_t>(seed));
    Trajectory obs;
    obs.outputs.assign(sim.outputs.begin(), sim.outputs.begin() + 16);
    const KalmanResult kf = kalman_state(sys, g.gains, obs);
    if ((kf.state - sim.states[15]).norm() < (cinv * obs.outputs.back() - sim.states[15]).norm()) ++wins;
  }
  EXPECT_GE(wins, 160);
}

TEST(Kalman, SingleObservationIsItsOwnPosterior) {
  const LinearSystem sys = reference_system(0.02);
  Trajectory obs;
  obs.outputs = {Eigen::Vector3d(1, 2, 3)};
  const KalmanResult kf = kalman_state(sys, {}, obs);
  EXPECT_LT((kf.state - Eigen::Vector3d(1, 2, 3)).norm(), 1e-14);
  EXPECT_LT((kf.covariance - sys.noise_covariance()).norm(), 1e-14);
}

// Final-state trajectories from the reference plant, error coordinates.
TrajectorySet tails(const LinearSystem& sys, const LQRObjective& obj, int horizon, int count,
                    double spread, std::uint64_t seed) {
  GaussianRng rng(seed);
  const GainSequence g = riccati_gains(sys, obj, horizon).gains;
  TrajectorySet out;
  for (int j = 0; j < count; ++j) {
    LQRProblemSpec spec{sys, obj, horizon, VectorXd::Zero(3), spread * rng.normal_vector(3)};
    out.trajectories.push_back(simulate(spec, g, static_cast<std::uint64_t>(rng.uniform() * 1e9)).observed(true));
  }
  return out;
}

TEST(GainSequence, ExactOnNoiselessData) {
  const LinearSystem sys = reference_system(0.0);
  const LQRObjective obj = reference_classic();
  const TrajectorySet data = tails(sys, obj, 8, 3, 10.0, 4);
  const GainEstimate est = estimate_gain_sequence(sys, data, 8);
  const RiccatiTrace tr = riccati_gains(sys, obj, 8);
  // Late states sit near the target, so the regression loses a few digits.
  EXPECT_LT(testing::max_abs_diff(est.gains.gains, tr.gains.gains), 1e-7);
}

TEST(GainSequence, TooFewTrajectories) {
  const LinearSystem sys = reference_system(0.0);
  const TrajectorySet data = tails(sys, reference_classic(), 8, 2, 10.0, 4);
  const ErrorCode c = code_of([&] { estimate_gain_sequence(sys, data, 8); });
  EXPECT_TRUE(c == ErrorCode::kPrecondition || c == ErrorCode::kRankDeficient);
}

TEST(GainSequence, RequiresFinalStatesAndShortSuffix) {
  const LinearSystem sys = reference_system(0.0);
  TrajectorySet data = tails(sys, reference_classic(), 8, 4, 10.0, 4);
  EXPECT_EQ(code_of([&] { estimate_gain_sequence(sys, data, 9); }), ErrorCode::kPrecondition);
  data.trajectories[1].contains_final_state = false;
  EXPECT_EQ(code_of([&] { estimate_gain_sequence(sys, data, 8); }), ErrorCode::kPrecondition);
}

TEST(GainSequence, ErrorShrinksWithMoreTrajectories) {
  const LinearSystem sys = reference_system(0.02);
  const LQRObjective obj = reference_classic();
  const RiccatiTrace tr = riccati_gains(sys, obj, 6);
  auto mean_error = [&](int m) {
    double total = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      const TrajectorySet data = tails(sys, obj, 6, m, 100.0, 1000 + seed);
      const GainEstimate est = estimate_gain_sequence(sys, data, 6);
      for (int k = 0; k < 6; ++k) total += (est.gains[k] - tr.gains[k]).norm();
    }
    return total / 60.0;
  };
  double prev = mean_error(3);
  for (int m : {6, 12, 24}) {
    const double e = mean_error(m);
    EXPECT_LE(e, prev) << "M = " << m;
    prev = e;
  }
}

TEST(InfiniteGain, ExactWithoutNoise) {
  const LinearSystem sys = reference_system(0.0);
  const LQRObjective obj = reference_classic();
  const DareSolution d = solve_dare(sys, obj.Q, obj.R);
  const SimulationResult sim = simulate_constant_gain(sys, d.K, Eigen::Vector3d(3, -1, 2), 50, 0.0, 1);
  const InfiniteGainEstimate e = estimate_infinite_gain(sys, sim.observed());
  EXPECT_LT((e.closed_loop - (sys.A - sys.B * d.K)).norm(), 1e-6);
  EXPECT_FALSE(e.bias_corrected);
}

TEST(InfiniteGain, GainErrorObeysPseudoInverseBound) {
  const LinearSystem sys = reference_system(0.05);
  const LQRObjective obj = reference_classic();
  const DareSolution d = solve_dare(sys, obj.Q, obj.R);
  const MatrixXd ac = sys.A - sys.B * d.K;
  const double bp = linalg::pinv(sys.B).norm();
  for (int seed = 0; seed < 20; ++seed) {
    const SimulationResult sim =
        simulate_constant_gain(sys, d.K, VectorXd::Zero(3), 400, 1.0, static_cast<std::uint64_t>(seed));
    const InfiniteGainEstimate e = estimate_infinite_gain(sys, sim.observed());
    const double lhs = (e.gain - d.K).norm();
    const double rhs = bp * std::sqrt(3.0) * (e.closed_loop - ac).norm();
    EXPECT_LE(lhs, rhs + 1e-12);
    EXPECT_TRUE(e.bias_corrected || e.fallback_to_ols);
  }
}

}  // namespace
}  // namespace lqr_recon
