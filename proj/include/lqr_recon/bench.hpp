#pragma once

// Benchmark sweeps. Each sweep point is a pure function of (configuration,
// axis value, seed) so rows can be recomputed individually.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lqr_recon/io.hpp"

namespace lqr_recon {

/// Runs fn(0..count-1) on `jobs` threads (jobs <= 0 means 1). The first
/// exception thrown by any task is rethrown after all threads join.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

/// Relative Frobenius error of R from the final-state IOC with the true
/// target, on a dataset with M history trajectories and the given noise.
double final_state_r_error(const DatasetConfig& config, int trajectories, double noise_std,
                           std::uint64_t seed);

/// Scale-matched relative error of (H, Q, R) from the classic pipeline
/// stages with the true target. NaN when a stage fails.
double classic_weights_error(const DatasetConfig& config, double noise_std, std::uint64_t seed,
                             int window);

struct PredictionPoint {
  bool ok = false;
  std::string failed_stage;
  int n_star = 0;
  std::vector<int> steps;       // absolute time k of each forecast entry
  std::vector<double> ours;     // ||x_hat_k - x_k||
  std::vector<double> polyfit;  // same for the polynomial baseline
};

/// Full classic pipeline on a generated dataset (probe trajectories for the
/// target when the configuration has them), compared with the true states.
PredictionPoint prediction_errors(const DatasetConfig& config, std::uint64_t seed, int theta,
                                  int window, int polyfit_order);

struct BenchOutput {
  std::string name;
  std::filesystem::path path;
  std::size_t rows = 0;
};

/// Runs every figure of a sweep document and writes one CSV per figure into
/// out_dir. Throws kParse on a malformed sweep and kIo on write failures.
std::vector<BenchOutput> run_bench(const std::string& sweep_json, const std::filesystem::path& out_dir,
                                   int jobs);

}  // namespace lqr_recon
