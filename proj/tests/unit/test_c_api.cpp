// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lqr_recon/lqr_recon.h"

namespace {

std::string read_config(const std::string& name) {
  std::ifstream in(std::string(LQRR_CONFIG_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string take(char* s) {
  std::string out = s ? s : "";
  lqrr_string_free(s);
  return out;
}

lqrr_system* scalar_system(double a, double b) {
  lqrr_system* sys = nullptr;
  EXPECT_EQ(lqrr_system_create(1, 1, &a, &b, nullptr, nullptr, &sys), LQRR_OK);
  return sys;
}

lqrr_objective* scalar_objective(double h, double q, double r) {
  lqrr_objective* obj = nullptr;
  EXPECT_EQ(lqrr_objective_create(1, 1, &h, &q, &r, LQRR_SETTING_CLASSIC, &obj), LQRR_OK);
  return obj;
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(lqrr_version(), "0.1.0");
  EXPECT_STREQ(lqrr_status_name(LQRR_OK), "ok");
  EXPECT_STREQ(lqrr_status_name(LQRR_ERR_PRECONDITION), "precondition");
  EXPECT_STREQ(lqrr_status_name(LQRR_ERR_AMBIGUOUS), "ambiguous");
  EXPECT_STREQ(lqrr_status_name(LQRR_ERR_NULL_ARGUMENT), "null-argument");
  EXPECT_STREQ(lqrr_status_name(static_cast<lqrr_status>(99)), "unknown");
}

TEST(CApi, NullArguments) {
  const double one = 1.0;
  EXPECT_EQ(lqrr_system_create(1, 1, nullptr, &one, nullptr, nullptr, nullptr), LQRR_ERR_NULL_ARGUMENT);
  EXPECT_NE(std::string(lqrr_last_error()), "");
  EXPECT_EQ(lqrr_system_from_json(nullptr, nullptr), LQRR_ERR_NULL_ARGUMENT);
  EXPECT_EQ(lqrr_riccati_gains(nullptr, nullptr, 3, nullptr), LQRR_ERR_NULL_ARGUMENT);
  EXPECT_EQ(lqrr_run_pipeline(nullptr, nullptr, nullptr), LQRR_ERR_NULL_ARGUMENT);
  // Free functions accept NULL.
  lqrr_system_free(nullptr);
  lqrr_objective_free(nullptr);
  lqrr_dataset_free(nullptr);
  lqrr_report_free(nullptr);
  lqrr_string_free(nullptr);
}

TEST(CApi, SystemCreateAndValidate) {
  // Planar plant, C = I by default.
  const double a[] = {1, 0, 0, 1};
  const double b[] = {0.2, 0, 0, 0.2};
  lqrr_system* sys = nullptr;
  ASSERT_EQ(lqrr_system_create(2, 2, a, b, nullptr, nullptr, &sys), LQRR_OK);
  EXPECT_EQ(lqrr_system_state_dim(sys), 2);
  EXPECT_EQ(lqrr_system_input_dim(sys), 2);
  int passed = 0;
  char* details = nullptr;
  ASSERT_EQ(lqrr_system_validate(sys, &passed, &details), LQRR_OK);
  EXPECT_EQ(passed, 1);
  take(details);
  char* json = nullptr;
  ASSERT_EQ(lqrr_system_to_json(sys, &json), LQRR_OK);
  lqrr_system* back = nullptr;
  EXPECT_EQ(lqrr_system_from_json(take(json).c_str(), &back), LQRR_OK);
  EXPECT_EQ(lqrr_system_state_dim(back), 2);
  lqrr_system_free(back);
  lqrr_system_free(sys);

  const double zero_b[] = {0, 0, 0, 0};
  ASSERT_EQ(lqrr_system_create(2, 2, a, zero_b, nullptr, nullptr, &sys), LQRR_OK);
  ASSERT_EQ(lqrr_system_validate(sys, &passed, &details), LQRR_OK);
  EXPECT_EQ(passed, 0);
  EXPECT_FALSE(take(details).empty());
  lqrr_system_free(sys);
}

TEST(CApi, BadInputsReportErrors) {
  lqrr_system* sys = nullptr;
  EXPECT_EQ(lqrr_system_from_json("{oops", &sys), LQRR_ERR_PARSE);
  EXPECT_EQ(sys, nullptr);
  const double a = 1.0, b = 1.0, neg = -1.0;
  EXPECT_EQ(lqrr_system_create(0, 1, &a, &b, nullptr, nullptr, &sys), LQRR_ERR_STRUCTURAL);
  lqrr_objective* obj = nullptr;
  EXPECT_NE(lqrr_objective_create(1, 1, &a, &a, &neg, LQRR_SETTING_CLASSIC, &obj), LQRR_OK);
  EXPECT_EQ(lqrr_objective_create(1, 1, nullptr, nullptr, &a, LQRR_SETTING_CLASSIC, &obj), LQRR_ERR_STRUCTURAL);
}

TEST(CApi, OneStepGainClosedForm) {
  lqrr_system* sys = scalar_system(2.0, 1.0);
  lqrr_objective* obj = scalar_objective(3.0, 1.0, 1.0);
  double k = 0.0;
  ASSERT_EQ(lqrr_riccati_gains(sys, obj, 1, &k), LQRR_OK);
  EXPECT_NEAR(k, 3.0 * 2.0 / (1.0 + 3.0), 1e-15);
  EXPECT_EQ(lqrr_riccati_gains(sys, obj, 0, &k), LQRR_ERR_PRECONDITION);
  lqrr_objective_free(obj);
  lqrr_system_free(sys);
}

TEST(CApi, DareScalarClosedForm) {
  lqrr_system* sys = scalar_system(1.0, 1.0);
  lqrr_objective* obj = scalar_objective(1.0, 1.0, 1.0);
  double p = 0.0, k = 0.0;
  ASSERT_EQ(lqrr_dare(sys, obj, &p, &k), LQRR_OK);
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));
  EXPECT_NEAR(p, golden, 1e-12);
  EXPECT_NEAR(k, golden / (1.0 + golden), 1e-12);
  EXPECT_EQ(lqrr_dare(sys, obj, nullptr, nullptr), LQRR_OK);
  lqrr_objective_free(obj);
  lqrr_system_free(sys);
}

TEST(CApi, DatasetGenerateWriteLoad) {
  const std::string cfg = read_config("classic.json");
  lqrr_dataset* data = nullptr;
  ASSERT_EQ(lqrr_dataset_generate(cfg.c_str(), 7, 12, &data), LQRR_OK) << lqrr_last_error();
  EXPECT_EQ(lqrr_dataset_history_count(data), 12);
  EXPECT_EQ(lqrr_dataset_probe_count(data), 2);
  EXPECT_EQ(lqrr_dataset_observed_steps(data), 15);
  EXPECT_EQ(lqrr_dataset_true_horizon(data), 20);
  const auto dir = std::filesystem::temp_directory_path() / "lqrr_test_c_api";
  std::filesystem::remove_all(dir);
  ASSERT_EQ(lqrr_dataset_write(data, dir.c_str()), LQRR_OK);
  lqrr_dataset* back = nullptr;
  ASSERT_EQ(lqrr_dataset_load(dir.c_str(), &back), LQRR_OK);
  EXPECT_EQ(lqrr_dataset_history_count(back), 12);
  lqrr_system* sys = nullptr;
  ASSERT_EQ(lqrr_dataset_system(back, &sys), LQRR_OK);
  EXPECT_EQ(lqrr_system_state_dim(sys), 3);
  lqrr_system_free(sys);
  lqrr_dataset_free(back);
  lqrr_dataset_free(data);
  std::filesystem::remove_all(dir);

  EXPECT_EQ(lqrr_dataset_load("/nonexistent/lqrr", &back), LQRR_ERR_IO);
  EXPECT_EQ(lqrr_dataset_generate("{\"system\": 1}", 1, -1, &data), LQRR_ERR_PARSE);
}

TEST(CApi, PipelineAndReportAccessors) {
  const std::string cfg = read_config("classic.json");
  lqrr_dataset* data = nullptr;
  ASSERT_EQ(lqrr_dataset_generate(cfg.c_str(), 1, -1, &data), LQRR_OK);
  lqrr_pipeline_options opts;
  lqrr_pipeline_options_init(&opts);
  EXPECT_EQ(opts.theta, 10);
  EXPECT_EQ(opts.window, 6);
  EXPECT_EQ(opts.use_probes, 1);
  opts.setting = LQRR_SETTING_CLASSIC;
  lqrr_report* rep = nullptr;
  ASSERT_EQ(lqrr_run_pipeline(data, &opts, &rep), LQRR_OK) << lqrr_last_error();
  EXPECT_STREQ(lqrr_report_failed_stage(rep), "");
  EXPECT_EQ(lqrr_report_n_star(rep), 20);
  double mu0[3] = {0, 0, 0};
  EXPECT_EQ(lqrr_report_mu0(rep, mu0, 3), 3);
  EXPECT_GT(std::abs(mu0[0]) + std::abs(mu0[1]) + std::abs(mu0[2]), 0.0);
  double target[3] = {0, 0, 0};
  EXPECT_EQ(lqrr_report_target(rep, target, 1), 3);  // length reported even when truncated
  EXPECT_NEAR(target[0], 6.0, 0.1);
  char* json = nullptr;
  ASSERT_EQ(lqrr_report_to_json(rep, &json), LQRR_OK);
  EXPECT_NE(take(json).find("\"schema_version\""), std::string::npos);
  lqrr_report_free(rep);
  lqrr_dataset_free(data);
}

TEST(CApi, PipelineStageFailureStillGivesAReport) {
  std::string cfg = read_config("classic.json");
  // Heads instead of tails: the classic gain regression has no final states.
  const auto pos = cfg.find("\"final_state\": true");
  ASSERT_NE(pos, std::string::npos);
  cfg.replace(pos, 19, "\"final_state\": false");
  const auto hl = cfg.find("\"history_length\": 0");
  ASSERT_NE(hl, std::string::npos);
  cfg.replace(hl, 19, "\"history_length\": 4");
  lqrr_dataset* data = nullptr;
  ASSERT_EQ(lqrr_dataset_generate(cfg.c_str(), 1, -1, &data), LQRR_OK) << lqrr_last_error();
  lqrr_pipeline_options opts;
  lqrr_pipeline_options_init(&opts);
  opts.setting = LQRR_SETTING_CLASSIC;
  lqrr_report* rep = nullptr;
  const lqrr_status s = lqrr_run_pipeline(data, &opts, &rep);
  EXPECT_NE(s, LQRR_OK);
  ASSERT_NE(rep, nullptr);
  EXPECT_STREQ(lqrr_report_failed_stage(rep), "gain-estimation");
  EXPECT_EQ(lqrr_report_mu0(rep, nullptr, 0), 0);
  lqrr_report_free(rep);
  lqrr_dataset_free(data);
}

}  // namespace
