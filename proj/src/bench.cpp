#include "lqr_recon/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lqr_recon/error.hpp"
#include "lqr_recon/horizon.hpp"
#include "lqr_recon/ioc_final_state.hpp"
#include "lqr_recon/pipeline.hpp"
#include "lqr_recon/predict.hpp"
#include "lqr_recon/rng.hpp"

namespace lqr_recon {

using nlohmann::json;

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(jobs, count));
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto loop = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }
  if (first) std::rethrow_exception(first);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DatasetConfig with_noise(DatasetConfig c, double noise_std) {
  c.spec.system = c.spec.system.with_noise(noise_std);
  return c;
}

double relative_frobenius(const MatrixXd& est, const MatrixXd& truth) {
  return (est - truth).norm() / truth.norm();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
    return os.str();
  }
};

std::vector<double> number_list(const json& fig, const char* key) {
  if (!fig.contains(key) || !fig.at(key).is_array()) {
    fail(ErrorCode::kParse, std::string("figure needs an array '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : fig.at(key)) {
    if (!v.is_number()) fail(ErrorCode::kParse, std::string(key) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

int int_field(const json& fig, const char* key, int fallback) {
  if (!fig.contains(key)) return fallback;
  if (!fig.at(key).is_number_integer()) fail(ErrorCode::kParse, std::string(key) + ": expected an integer");
  return fig.at(key).get<int>();
}

double number_field(const json& fig, const char* key, double fallback) {
  if (!fig.contains(key)) return fallback;
  if (!fig.at(key).is_number()) fail(ErrorCode::kParse, std::string(key) + ": expected a number");
  return fig.at(key).get<double>();
}

// Per-row dataset seed: independent of the axis so points along an axis
// share their random draws.
std::uint64_t row_seed(std::uint64_t base, int s) {
  return derive_seed(base, static_cast<std::uint64_t>(s));
}

Table r_error_vs_trajectories(const DatasetConfig& cfg, const json& fig, std::uint64_t base, int jobs) {
  const auto axis = number_list(fig, "axis");
  const int seeds = int_field(fig, "seeds", 8);
  const double noise = number_field(fig, "noise_std", cfg.spec.system.noise_std.size() ? cfg.spec.system.noise_std(0) : 0.0);
  Table t{{"axis", "seed", "metric"}, {}};
  t.rows.resize(axis.size() * static_cast<std::size_t>(seeds));
  parallel_for(static_cast<int>(t.rows.size()), jobs, [&](int i) {
    const double m = axis[static_cast<std::size_t>(i / seeds)];
    const std::uint64_t seed = row_seed(base, i % seeds);
    double err = kNaN;
    try {
      err = final_state_r_error(cfg, static_cast<int>(m), noise, seed);
    } catch (const Error&) {
    }
    t.rows[static_cast<std::size_t>(i)] = {format_number(m), std::to_string(seed), format_number(err)};
  });
  return t;
}

Table weights_error_vs_noise(const DatasetConfig& cfg, const json& fig, std::uint64_t base, int jobs) {
  const auto axis = number_list(fig, "axis");
  const int seeds = int_field(fig, "seeds", 10);
  const int window = int_field(fig, "window", 6);
  Table t{{"axis", "seed", "metric"}, {}};
  t.rows.resize(axis.size() * static_cast<std::size_t>(seeds));
  parallel_for(static_cast<int>(t.rows.size()), jobs, [&](int i) {
    const double sigma = axis[static_cast<std::size_t>(i / seeds)];
    const std::uint64_t seed = row_seed(base, i % seeds);
    const double err = classic_weights_error(cfg, sigma, seed, window);
    t.rows[static_cast<std::size_t>(i)] = {format_number(sigma), std::to_string(seed), format_number(err)};
  });
  return t;
}

Table jn_curve(const DatasetConfig& cfg, const json& fig, std::uint64_t base, int jobs) {
  const auto noise = number_list(fig, "noise");
  const int seeds = int_field(fig, "seeds", 1);
  const int l = cfg.generation.current_steps;
  require(l >= 1, ErrorCode::kParse, "jn_curve needs generation.current_steps >= 1");
  const int n_min = int_field(fig, "n_min", l + 1);
  const int n_max = int_field(fig, "n_max", 60);
  require(n_min > l && n_max >= n_min, ErrorCode::kParse, "jn_curve needs l < n_min <= n_max");
  Table t{{"series", "axis", "seed", "metric"}, {}};
  const int per = n_max - n_min + 1;
  const int points = static_cast<int>(noise.size()) * seeds;
  t.rows.resize(static_cast<std::size_t>(points * per));
  parallel_for(points, jobs, [&](int i) {
    const double sigma = noise[static_cast<std::size_t>(i / seeds)];
    const std::uint64_t seed = row_seed(base, i % seeds);
    const Dataset data = generate_dataset(with_noise(cfg, sigma), seed);
    HorizonEvaluator eval(HorizonProblem{data.config.spec.system, cfg.spec.objective, data.current,
                                         cfg.spec.target});
    for (int k = 0; k < per; ++k) {
      t.rows[static_cast<std::size_t>(i * per + k)] = {format_number(sigma), std::to_string(n_min + k),
                                                       std::to_string(seed),
                                                       format_number(eval.jn(n_min + k))};
    }
  });
  return t;
}

Table prediction_table(const DatasetConfig& cfg, const json& fig, std::uint64_t base, int jobs) {
  const int seeds = int_field(fig, "seeds", 20);
  const int theta = int_field(fig, "theta", 10);
  const int window = int_field(fig, "window", 6);
  const int order = int_field(fig, "polyfit_order", 3);
  std::vector<int> ks;
  for (double k : number_list(fig, "k")) ks.push_back(static_cast<int>(k));
  std::vector<PredictionPoint> points(static_cast<std::size_t>(seeds));
  parallel_for(seeds, jobs, [&](int s) {
    points[static_cast<std::size_t>(s)] = prediction_errors(cfg, row_seed(base, s), theta, window, order);
  });
  Table t{{"axis", "seed", "method", "metric"}, {}};
  for (int s = 0; s < seeds; ++s) {
    const auto& p = points[static_cast<std::size_t>(s)];
    const std::string seed = std::to_string(row_seed(base, s));
    for (int k : ks) {
      double ours = kNaN;
      double poly = kNaN;
      for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (p.steps[i] == k) {
          ours = p.ours[i];
          poly = p.polyfit[i];
        }
      }
      t.rows.push_back({std::to_string(k), seed, "ours", format_number(ours)});
      t.rows.push_back({std::to_string(k), seed, "polyfit", format_number(poly)});
    }
  }
  return t;
}

}  // namespace

double final_state_r_error(const DatasetConfig& config, int trajectories, double noise_std,
                           std::uint64_t seed) {
  DatasetConfig cfg = with_noise(config, noise_std);
  cfg.generation.trajectories = trajectories;
  const Dataset data = generate_dataset(cfg, seed);
  Problem1Options opts;
  opts.starts = default_problem1_starts(cfg.spec.system.input_dim(), 3);
  const Problem1Result res = solve_problem1(cfg.spec.system, data.history, cfg.spec.target, opts);
  return relative_frobenius(res.R, cfg.spec.objective.R);
}

double classic_weights_error(const DatasetConfig& config, double noise_std, std::uint64_t seed,
                             int window) {
  const DatasetConfig cfg = with_noise(config, noise_std);
  const Dataset data = generate_dataset(cfg, seed);
  PipelineOptions opts;
  opts.setting = Setting::kClassic;
  opts.window = window;
  opts.known_target = cfg.spec.target;
  opts.known_horizon = cfg.spec.horizon;
  Trajectory current = data.current;
  if (current.length() < 1) current = data.history.trajectories.front();
  const ReconstructionReport rep = run_pipeline(data.history, current, cfg.spec.system, opts);
  if (rep.R.size() == 0) return kNaN;
  const auto& truth = cfg.spec.objective;
  return scale_matched_error(rep.H, rep.Q, rep.R, truth.H, truth.Q, truth.R);
}

PredictionPoint prediction_errors(const DatasetConfig& config, std::uint64_t seed, int theta,
                                  int window, int polyfit_order) {
  const Dataset data = generate_dataset(config, seed);
  const LinearSystem& sys = config.spec.system;
  PipelineOptions opts;
  opts.setting = Setting::kClassic;
  opts.theta = theta;
  opts.window = window;
  opts.target_probes = data.probes;
  const ReconstructionReport rep = run_pipeline(data.history, data.current, sys, opts);

  PredictionPoint p;
  p.ok = rep.ok();
  p.failed_stage = rep.failed_stage;
  p.n_star = rep.n_star;
  const int l = data.current.length();
  const int last = config.spec.horizon;
  const auto poly = baseline_polyfit_predict(sys, data.current, polyfit_order, last - l);
  for (int k = l + 1; k <= last; ++k) {
    const VectorXd& truth = data.current_states[static_cast<std::size_t>(k)];
    const std::size_t idx = static_cast<std::size_t>(k - l - 1);
    p.steps.push_back(k);
    p.ours.push_back(p.ok && idx < rep.forecast.size() ? (rep.forecast[idx] - truth).norm() : kNaN);
    p.polyfit.push_back((poly[idx] - truth).norm());
  }
  return p;
}

std::vector<BenchOutput> run_bench(const std::string& sweep_json, const std::filesystem::path& out_dir,
                                   int jobs) {
  json sweep;
  try {
    sweep = json::parse(sweep_json);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid sweep JSON: ") + e.what());
  }
  if (!sweep.is_object() || !sweep.contains("figures") || !sweep.at("figures").is_array()) {
    fail(ErrorCode::kParse, "sweep needs a 'figures' array");
  }
  const std::uint64_t base = sweep.contains("seed") ? sweep.at("seed").get<std::uint64_t>() : 1;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<BenchOutput> outputs;
  for (const auto& fig : sweep.at("figures")) {
    if (!fig.is_object() || !fig.contains("kind") || !fig.contains("config")) {
      fail(ErrorCode::kParse, "each figure needs 'kind' and 'config'");
    }
    const std::string kind = fig.at("kind").get<std::string>();
    const std::string name = fig.contains("name") ? fig.at("name").get<std::string>() : kind;
    const DatasetConfig cfg = dataset_config_from_json(fig.at("config").dump());
    Table table;
    if (kind == "r_error_vs_trajectories") {
      table = r_error_vs_trajectories(cfg, fig, base, jobs);
    } else if (kind == "weights_error_vs_noise") {
      table = weights_error_vs_noise(cfg, fig, base, jobs);
    } else if (kind == "jn_curve") {
      table = jn_curve(cfg, fig, base, jobs);
    } else if (kind == "prediction_error") {
      table = prediction_table(cfg, fig, base, jobs);
    } else {
      fail(ErrorCode::kParse, "unknown figure kind '" + kind + "'");
    }
    const auto path = out_dir / (name + ".csv");
    write_text_file(path, table.csv());
    outputs.push_back({name, path, table.rows.size()});
  }
  return outputs;
}

}  // namespace lqr_recon
