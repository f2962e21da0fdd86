#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lqr_recon/io.hpp"
#include "lqr_recon/ioc_classic.hpp"
#include "lqr_recon/pipeline.hpp"

namespace lqr_recon {
namespace {

DatasetConfig config(const std::string& path) { return dataset_config_from_json(read_text_file(path)); }

DatasetConfig config_file(const std::string& name) { return config(std::string(LQRR_CONFIG_DIR) + "/" + name); }

PipelineOptions classic_options(const Dataset& data) {
  PipelineOptions o;
  o.setting = Setting::kClassic;
  o.target_probes = data.probes;
  return o;
}

ReconstructionReport run(const Dataset& data, const PipelineOptions& o) {
  return run_pipeline(data.history, data.current, data.config.spec.system, o);
}

double weight_error(const ReconstructionReport& rep, const LQRObjective& truth) {
  return scale_matched_error(rep.H, rep.Q, rep.R, truth.H, truth.Q, truth.R);
}

double mu0_error(const ReconstructionReport& rep, const Dataset& data) {
  if (!rep.ok()) return INFINITY;
  return (rep.mu0 - data.current_inputs[static_cast<std::size_t>(data.current.length())]).norm();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Real closed-loop modes and no noise: every stage is exact up to rounding.
TEST(Pipeline, NoiselessEndToEndIsExact) {
  const DatasetConfig cfg = config(std::string(LQRR_TEST_DATA_DIR) + "/real_modes.json");
  const Dataset data = generate_dataset(cfg, 3);
  const ReconstructionReport rep = run(data, classic_options(data));
  ASSERT_TRUE(rep.ok()) << rep.failed_stage << ": " << rep.error_message;
  const double scale = cfg.spec.target.norm() + cfg.spec.initial.norm();
  EXPECT_LT((rep.target - cfg.spec.target).norm(), 1e-9 * scale);
  EXPECT_EQ(rep.weights_method, "exact-nullspace");
  EXPECT_LT(weight_error(rep, cfg.spec.objective), 1e-8);
  EXPECT_EQ(rep.n_star, cfg.spec.horizon);
  const double u = data.current_inputs[static_cast<std::size_t>(data.current.length())].norm();
  EXPECT_LT(mu0_error(rep, data), 1e-6 * u);
  const int l = data.current.length();
  ASSERT_EQ(static_cast<int>(rep.forecast.size()), cfg.spec.horizon - l);
  for (std::size_t k = 0; k < rep.forecast.size(); ++k) {
    EXPECT_LT((rep.forecast[k] - data.current_states[static_cast<std::size_t>(l) + 1 + k]).norm(), 1e-9 * scale);
  }
}

TEST(Pipeline, ReferenceHorizonOnNoisyData) {
  const DatasetConfig cfg = config_file("classic.json");
  int exact = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset data = generate_dataset(cfg, seed);
    const ReconstructionReport rep = run(data, classic_options(data));
    ASSERT_TRUE(rep.ok()) << seed << " " << rep.failed_stage << ": " << rep.error_message;
    EXPECT_LE(std::abs(rep.n_star - cfg.spec.horizon), 2) << seed;
    EXPECT_LT(weight_error(rep, cfg.spec.objective), 0.05) << seed;
    if (rep.n_star == cfg.spec.horizon) {
      ++exact;
      const int l = data.current.length();
      for (std::size_t k = 0; k < rep.forecast.size(); ++k) {
        EXPECT_LT((rep.forecast[k] - data.current_states[static_cast<std::size_t>(l) + 1 + k]).norm(), 0.05);
      }
    }
  }
  EXPECT_GE(exact, 10);
}

// Isotropic planar plant: the weights are only fixed up to a congruence per
// channel, and the best-conditioned member is the true one.
TEST(Pipeline, PlanarWeightsWithinFivePercent) {
  const DatasetConfig cfg = config_file("planar.json");
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset data = generate_dataset(cfg, seed);
    const ReconstructionReport rep = run(data, classic_options(data));
    ASSERT_TRUE(rep.ok()) << seed << " " << rep.failed_stage << ": " << rep.error_message;
    EXPECT_LT(weight_error(rep, cfg.spec.objective), 0.05) << seed;
    EXPECT_EQ(rep.n_star, cfg.spec.horizon) << seed;
  }
}

TEST(Pipeline, Deterministic) {
  const DatasetConfig cfg = config_file("classic.json");
  const Dataset a = generate_dataset(cfg, 5);
  const Dataset b = generate_dataset(cfg, 5);
  EXPECT_EQ(report_to_json(run(a, classic_options(a))), report_to_json(run(b, classic_options(b))));
}

TEST(Pipeline, GroundTruthStagesNeverWorsenTheInput) {
  const DatasetConfig cfg = config_file("classic.json");
  std::vector<double> full, with_target, with_weights, with_horizon;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset data = generate_dataset(cfg, seed);
    PipelineOptions o = classic_options(data);
    full.push_back(mu0_error(run(data, o), data));
    o.known_target = cfg.spec.target;
    with_target.push_back(mu0_error(run(data, o), data));
    o.known_objective = cfg.spec.objective;
    with_weights.push_back(mu0_error(run(data, o), data));
    o.known_horizon = cfg.spec.horizon;
    with_horizon.push_back(mu0_error(run(data, o), data));
  }
  EXPECT_LE(median(with_target), median(full));
  EXPECT_LE(median(with_weights), median(with_target));
  EXPECT_LE(median(with_horizon), median(with_weights));
}

TEST(Pipeline, FailingStageKeepsThePartialReport) {
  DatasetConfig cfg = config_file("classic.json");
  cfg.generation.final_state = false;  // heads only; the gain regression needs tails
  cfg.generation.history_length = 4;
  const Dataset data = generate_dataset(cfg, 1);
  const ReconstructionReport rep = run(data, classic_options(data));
  EXPECT_FALSE(rep.ok());
  EXPECT_EQ(rep.failed_stage, "gain-estimation");
  EXPECT_FALSE(rep.error_message.empty());
  ASSERT_GE(rep.completed_stages.size(), 2u);
  EXPECT_EQ(rep.completed_stages[0], "validation");
  EXPECT_EQ(rep.completed_stages[1], "target");
  EXPECT_EQ(rep.target.size(), 3);
  EXPECT_TRUE(rep.mu0.size() == 0);
  const std::string json = report_to_json(rep);
  EXPECT_NE(json.find("gain-estimation"), std::string::npos);
}

TEST(Pipeline, FinalStateSettingOnFragments) {
  DatasetConfig cfg = config_file("final_state.json");
  cfg.generation.history_length = 6;  // tails of length 6 of the 10-step runs
  const Dataset data = generate_dataset(cfg, 2);
  PipelineOptions o;
  o.setting = Setting::kFinalStateOnly;
  o.target_probes = data.probes;
  const ReconstructionReport rep = run(data, o);
  ASSERT_TRUE(rep.ok()) << rep.failed_stage << ": " << rep.error_message;
  EXPECT_TRUE(rep.H.isIdentity(1e-12));
  EXPECT_LT((rep.R / rep.R.norm() - cfg.spec.objective.R / cfg.spec.objective.R.norm()).norm(), 0.1);
  // Short tails leave J_N shallow, so only the search contract is checked.
  EXPECT_GT(rep.n_star, data.current.length());
  EXPECT_EQ(rep.mu0.size(), 3);
  EXPECT_EQ(static_cast<int>(rep.forecast.size()), rep.n_star - data.current.length());
}

TEST(Pipeline, ValidationRejectsAnUncontrollableSystem) {
  const DatasetConfig cfg = config_file("classic.json");
  const Dataset data = generate_dataset(cfg, 1);
  LinearSystem bad = cfg.spec.system;
  bad.B.col(2) = bad.B.col(1);
  const ReconstructionReport rep = run_pipeline(data.history, data.current, bad, classic_options(data));
  EXPECT_EQ(rep.failed_stage, "validation");
  EXPECT_TRUE(rep.completed_stages.empty());
}

}  // namespace
}  // namespace lqr_recon
