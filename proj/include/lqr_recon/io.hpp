#pragma once

// Serialization (JSON documents, trajectory CSV) and synthetic dataset
// generation from a configuration document.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lqr_recon/model.hpp"
#include "lqr_recon/pipeline.hpp"

namespace lqr_recon {

// JSON text <-> domain types. Matrices are row-major nested arrays and the
// field names match the struct members. Parse failures throw kParse.
LinearSystem system_from_json(const std::string& text);
std::string system_to_json(const LinearSystem& sys);
LQRObjective objective_from_json(const std::string& text);
std::string objective_to_json(const LQRObjective& obj);
LQRProblemSpec spec_from_json(const std::string& text);
std::string spec_to_json(const LQRProblemSpec& spec);

std::string report_to_json(const ReconstructionReport& report);

/// CSV with header traj_id,t,y1..yp, rows ordered by (traj_id, t).
std::string trajectories_to_csv(const std::vector<Trajectory>& trajs, int first_id = 0);
/// Groups rows by traj_id (in order of first appearance); t must run 0..l
/// within each id. Flags are left false.
std::vector<Trajectory> trajectories_from_csv(const std::string& text);

/// Generation block of a dataset configuration.
struct GenerationConfig {
  int trajectories = 7;         // M
  double initial_spread = 10.0;  // history initial states: target + U(-s, s)^n
  /// History horizons N_j are drawn uniformly from [history_horizon_min,
  /// history_horizon_max]; 0 stands for the horizon.
  int history_horizon_min = 0;
  int history_horizon_max = 0;
  int history_length = 0;       // l_j kept per trajectory; 0 = N_j
  bool final_state = true;      // keep trajectory tails (true) or heads (false)
  int current_steps = 0;        // l of the current trajectory; 0 = none
  int probes = 0;               // line-fit probe trajectories
  double probe_scale = 10.0;
  int probe_steps = 0;          // 0 = current_steps, or horizon if that is 0
  int probe_horizon = 0;        // horizon the probes are planned with; 0 = horizon
};

struct DatasetConfig {
  LQRProblemSpec spec;  // spec.initial is the current trajectory's start
  GenerationConfig generation;
};

DatasetConfig dataset_config_from_json(const std::string& text);

struct Dataset {
  DatasetConfig config;
  std::uint64_t seed = 0;
  TrajectorySet history;
  TrajectorySet probes;
  Trajectory current;  // y_0..y_l
  // Ground truth for the current trajectory.
  std::vector<VectorXd> current_states;  // world frame x_0..x_N
  std::vector<VectorXd> current_inputs;  // u_0..u_{N-1}
};

/// Deterministic in (config, seed): history initial states, probe and noise
/// draws use separate derived streams.
Dataset generate_dataset(const DatasetConfig& config, std::uint64_t seed);

/// history_NNN.csv, probe_NNN.csv, current.csv and manifest.json. Throws kIo.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lqr_recon
