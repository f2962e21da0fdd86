// lqr-recon: command-line frontend over the C API.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 stage failure,
// 4 I/O error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lqr_recon/lqr_recon.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitStage = 3;
constexpr int kExitIo = 4;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(lqrr_status s) {
  switch (s) {
    case LQRR_OK: return kExitOk;
    case LQRR_ERR_IO: return kExitIo;
    case LQRR_ERR_PARSE:
    case LQRR_ERR_STRUCTURAL:
    case LQRR_ERR_NULL_ARGUMENT: return kExitUsage;
    default: return kExitStage;
  }
}

void check(lqrr_status s, const std::string& what) {
  if (s != LQRR_OK) throw CliError{exit_code_for(s), what + ": " + lqrr_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot open " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{kExitIo, "cannot write " + path};
  out << text;
  if (!out) throw CliError{kExitIo, "write failed: " + path};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  lqrr_string_free(s);
  return out;
}

int default_jobs() {
  if (const char* env = std::getenv("LQR_RECON_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 1;
}

struct SimulateArgs {
  std::string config;
  std::uint64_t seed = 1;
  int trajectories = -1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const std::string cfg = read_file(a.config);
  lqrr_dataset* data = nullptr;
  const lqrr_status s = lqrr_dataset_generate(cfg.c_str(), a.seed, a.trajectories, &data);
  if (s != LQRR_OK) {
    // Anything wrong with the configuration document is a usage error.
    throw CliError{s == LQRR_ERR_IO ? kExitIo : kExitUsage, std::string("bad config: ") + lqrr_last_error()};
  }
  const lqrr_status w = lqrr_dataset_write(data, a.out.c_str());
  const int m = lqrr_dataset_history_count(data);
  const int p = lqrr_dataset_probe_count(data);
  lqrr_dataset_free(data);
  if (w != LQRR_OK) throw CliError{kExitIo, std::string("writing dataset: ") + lqrr_last_error()};
  std::cerr << "wrote " << m << " history and " << p << " probe trajectories to " << a.out << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const std::string text = read_file(path);
  lqrr_system* sys = nullptr;
  check(lqrr_system_from_json(text.c_str(), &sys), "parsing system");
  int passed = 0;
  char* details = nullptr;
  const lqrr_status s = lqrr_system_validate(sys, &passed, &details);
  lqrr_system_free(sys);
  check(s, "validation");
  std::cout << take(details);
  std::cout << (passed ? "valid\n" : "invalid\n");
  return passed ? kExitOk : kExitStage;
}

struct RiccatiArgs {
  std::string system;
  std::string objective;
  int horizon = 1;
};

int cmd_riccati(const RiccatiArgs& a) {
  lqrr_system* sys = nullptr;
  lqrr_objective* obj = nullptr;
  check(lqrr_system_from_json(read_file(a.system).c_str(), &sys), "parsing system");
  const lqrr_status so = lqrr_objective_from_json(read_file(a.objective).c_str(), &obj);
  if (so != LQRR_OK) {
    lqrr_system_free(sys);
    check(so, "parsing objective");
  }
  const int n = lqrr_system_state_dim(sys);
  const int m = lqrr_system_input_dim(sys);
  std::vector<double> gains(static_cast<std::size_t>(a.horizon > 0 ? a.horizon * n * m : 0));
  const lqrr_status s = lqrr_riccati_gains(sys, obj, a.horizon, gains.data());
  lqrr_system_free(sys);
  lqrr_objective_free(obj);
  check(s, "riccati");
  std::cout.precision(17);
  for (int k = 0; k < a.horizon; ++k) {
    std::cout << "K_" << k << "\n";
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) std::cout << (j ? " " : "") << gains[static_cast<std::size_t>((k * m + i) * n + j)];
      std::cout << "\n";
    }
  }
  return kExitOk;
}

struct PipelineArgs {
  std::string data_dir;
  std::string setting;
  int theta = 10;
  int window = 6;
  int suffix = 0;
  bool no_probes = false;
  std::string out;
};

int cmd_pipeline(const PipelineArgs& a) {
  lqrr_dataset* data = nullptr;
  const lqrr_status ls = lqrr_dataset_load(a.data_dir.c_str(), &data);
  if (ls != LQRR_OK) {
    throw CliError{ls == LQRR_ERR_IO ? kExitIo : kExitUsage, std::string("loading data: ") + lqrr_last_error()};
  }
  lqrr_pipeline_options opts;
  lqrr_pipeline_options_init(&opts);
  opts.setting = a.setting == "final-state" ? LQRR_SETTING_FINAL_STATE : LQRR_SETTING_CLASSIC;
  opts.theta = a.theta;
  opts.window = a.window;
  opts.gain_suffix = a.suffix;
  opts.use_probes = a.no_probes ? 0 : 1;

  lqrr_report* rep = nullptr;
  const lqrr_status s = lqrr_run_pipeline(data, &opts, &rep);
  lqrr_dataset_free(data);
  if (rep == nullptr) check(s, "pipeline");
  const std::string stage = lqrr_report_failed_stage(rep);
  const std::string message = lqrr_last_error();
  char* json = nullptr;
  const lqrr_status js = lqrr_report_to_json(rep, &json);
  const int n_star = lqrr_report_n_star(rep);
  lqrr_report_free(rep);
  check(js, "serializing report");
  const std::string text = take(json) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  if (!stage.empty()) {
    std::cerr << "stage failed: " << stage << " (" << lqrr_status_name(s) << "): " << message << "\n";
    return kExitStage;
  }
  std::cerr << "estimated horizon " << n_star << "\n";
  return kExitOk;
}

struct BenchArgs {
  std::string sweep;
  std::string out;
  int jobs = 1;
};

int cmd_bench(const BenchArgs& a) {
  const std::string sweep = read_file(a.sweep);
  char* summary = nullptr;
  const lqrr_status s = lqrr_bench_run(sweep.c_str(), a.out.c_str(), a.jobs, &summary);
  if (s != LQRR_OK) {
    throw CliError{s == LQRR_ERR_IO ? kExitIo : kExitUsage, std::string("bench: ") + lqrr_last_error()};
  }
  std::cout << take(summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LQR reconstruction and control-input prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lqrr_version()));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset from a configuration");
  simulate->add_option("config", sim.config, "Dataset configuration JSON")->required();
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--trajectories,-M", sim.trajectories, "Number of history trajectories")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output directory")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check controllability and invertibility of a system");
  validate->add_option("system", validate_path, "System JSON")->required();

  RiccatiArgs ric;
  auto* riccati = app.add_subcommand("riccati", "Print the finite-horizon gain sequence");
  riccati->add_option("system", ric.system, "System JSON")->required();
  riccati->add_option("objective", ric.objective, "Objective JSON")->required();
  riccati->add_option("--horizon,-N", ric.horizon, "Horizon")->required()->check(CLI::PositiveNumber);

  PipelineArgs pipe;
  auto* pipeline = app.add_subcommand("pipeline", "Run the full reconstruction on a dataset directory");
  pipeline->add_option("data", pipe.data_dir, "Dataset directory (manifest.json + CSV)")->required();
  pipeline->add_option("--setting", pipe.setting, "Weight setting")
      ->required()
      ->check(CLI::IsMember({"classic", "final-state"}));
  pipeline->add_option("--theta", pipe.theta, "Horizon search step")->check(CLI::PositiveNumber);
  pipeline->add_option("--T", pipe.window, "Gain window for the classic setting")->check(CLI::PositiveNumber);
  pipeline->add_option("--suffix", pipe.suffix, "Gain-estimation suffix length (0 = shortest)")
      ->check(CLI::NonNegativeNumber);
  pipeline->add_flag("--no-probes", pipe.no_probes, "Ignore probe trajectories for the target");
  pipeline->add_option("--out", pipe.out, "Report path (default: standard output)");

  BenchArgs bench;
  bench.jobs = default_jobs();
  auto* bench_cmd = app.add_subcommand("bench", "Run benchmark sweeps and write CSV tables");
  bench_cmd->add_option("sweep", bench.sweep, "Sweep specification JSON")->required();
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();
  bench_cmd->add_option("--jobs,-j", bench.jobs, "Worker threads (default: LQR_RECON_JOBS or 1)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*validate) return cmd_validate(validate_path);
    if (*riccati) return cmd_riccati(ric);
    if (*pipeline) return cmd_pipeline(pipe);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  }
  return kExitUsage;
}
