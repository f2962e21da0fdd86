#include "lqr_recon/io.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lqr_recon/error.hpp"
#include "lqr_recon/lqr_forward.hpp"
#include "lqr_recon/rng.hpp"

namespace lqr_recon {

using nlohmann::json;

namespace {

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json vectors_json(const std::vector<VectorXd>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(vector_json(v));
  return out;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    fail(ErrorCode::kParse, std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) fail(ErrorCode::kParse, std::string(what) + ": expected a number");
  return j.get<double>();
}

MatrixXd parse_matrix(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::kParse, std::string(what) + ": expected nested arrays");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return MatrixXd(0, 0);
  if (!j[0].is_array()) fail(ErrorCode::kParse, std::string(what) + ": expected nested arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::kParse, std::string(what) + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

VectorXd parse_vector(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::kParse, std::string(what) + ": expected an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

int parse_int(const json& j, const char* what) {
  if (!j.is_number_integer()) fail(ErrorCode::kParse, std::string(what) + ": expected an integer");
  return j.get<int>();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
}

json system_json(const LinearSystem& sys) {
  return {{"A", matrix_json(sys.A)},
          {"B", matrix_json(sys.B)},
          {"C", matrix_json(sys.C)},
          {"noise_std", vector_json(sys.noise_std)}};
}

LinearSystem parse_system(const json& j) {
  LinearSystem sys;
  sys.A = parse_matrix(field(j, "A"), "A");
  sys.B = parse_matrix(field(j, "B"), "B");
  sys.C = j.contains("C") ? parse_matrix(j.at("C"), "C") : MatrixXd::Identity(sys.A.rows(), sys.A.rows());
  const Eigen::Index p = sys.C.rows();
  if (!j.contains("noise_std")) {
    sys.noise_std = VectorXd::Zero(p);
  } else if (j.at("noise_std").is_number()) {
    sys.noise_std = VectorXd::Constant(p, j.at("noise_std").get<double>());
  } else {
    sys.noise_std = parse_vector(j.at("noise_std"), "noise_std");
  }
  sys.check_dimensions();
  return sys;
}

json objective_json(const LQRObjective& obj) {
  return {{"H", matrix_json(obj.H)},
          {"Q", matrix_json(obj.Q)},
          {"R", matrix_json(obj.R)},
          {"setting", to_string(obj.setting)}};
}

LQRObjective parse_objective(const json& j) {
  LQRObjective obj;
  obj.setting = j.contains("setting") ? setting_from_string(j.at("setting").get<std::string>())
                                      : Setting::kClassic;
  obj.R = parse_matrix(field(j, "R"), "R");
  obj.H = parse_matrix(field(j, "H"), "H");
  obj.Q = j.contains("Q") ? parse_matrix(j.at("Q"), "Q") : MatrixXd::Zero(obj.H.rows(), obj.H.cols());
  return obj;
}

json spec_json(const LQRProblemSpec& spec) {
  return {{"system", system_json(spec.system)},
          {"objective", objective_json(spec.objective)},
          {"horizon", spec.horizon},
          {"target", vector_json(spec.target)},
          {"initial", vector_json(spec.initial)}};
}

LQRProblemSpec parse_spec(const json& j) {
  LQRProblemSpec spec;
  spec.system = parse_system(field(j, "system"));
  spec.objective = parse_objective(field(j, "objective"));
  spec.horizon = parse_int(field(j, "horizon"), "horizon");
  const auto n = spec.system.state_dim();
  spec.target = j.contains("target") ? parse_vector(j.at("target"), "target") : VectorXd::Zero(n);
  spec.initial = j.contains("initial") ? parse_vector(j.at("initial"), "initial") : VectorXd::Zero(n);
  try {
    spec.check();
  } catch (const Error& e) {
    fail(ErrorCode::kParse, std::string("invalid problem: ") + e.what());
  }
  return spec;
}

json generation_json(const GenerationConfig& g) {
  return {{"trajectories", g.trajectories},   {"initial_spread", g.initial_spread},
          {"history_horizon_min", g.history_horizon_min},
          {"history_horizon_max", g.history_horizon_max},
          {"history_length", g.history_length}, {"final_state", g.final_state},
          {"current_steps", g.current_steps}, {"probes", g.probes},
          {"probe_scale", g.probe_scale},     {"probe_steps", g.probe_steps},
          {"probe_horizon", g.probe_horizon}};
}

GenerationConfig parse_generation(const json& j) {
  GenerationConfig g;
  if (j.is_null()) return g;
  if (!j.is_object()) fail(ErrorCode::kParse, "generation: expected an object");
  if (j.contains("trajectories")) g.trajectories = parse_int(j.at("trajectories"), "trajectories");
  if (j.contains("initial_spread")) g.initial_spread = number(j.at("initial_spread"), "initial_spread");
  if (j.contains("history_horizon_min")) {
    g.history_horizon_min = parse_int(j.at("history_horizon_min"), "history_horizon_min");
  }
  if (j.contains("history_horizon_max")) {
    g.history_horizon_max = parse_int(j.at("history_horizon_max"), "history_horizon_max");
  }
  if (j.contains("history_length")) g.history_length = parse_int(j.at("history_length"), "history_length");
  if (j.contains("final_state")) g.final_state = j.at("final_state").get<bool>();
  if (j.contains("current_steps")) g.current_steps = parse_int(j.at("current_steps"), "current_steps");
  if (j.contains("probes")) g.probes = parse_int(j.at("probes"), "probes");
  if (j.contains("probe_scale")) g.probe_scale = number(j.at("probe_scale"), "probe_scale");
  if (j.contains("probe_steps")) g.probe_steps = parse_int(j.at("probe_steps"), "probe_steps");
  if (j.contains("probe_horizon")) g.probe_horizon = parse_int(j.at("probe_horizon"), "probe_horizon");
  return g;
}

void check_generation(const DatasetConfig& c) {
  const auto& g = c.generation;
  const int n = c.spec.horizon;
  require(g.trajectories >= 0, ErrorCode::kParse, "generation.trajectories must be >= 0");
  const int lo = g.history_horizon_min > 0 ? g.history_horizon_min : n;
  const int hi = g.history_horizon_max > 0 ? g.history_horizon_max : n;
  require(g.history_horizon_min >= 0 && g.history_horizon_max >= 0 && lo <= hi, ErrorCode::kParse,
          "generation.history_horizon_min/max must satisfy 0 < min <= max");
  const int shortest = lo;
  require(g.history_length >= 0 && g.history_length <= shortest, ErrorCode::kParse,
          "generation.history_length must lie in [0, shortest history horizon]");
  require(g.current_steps >= 0 && g.current_steps <= n, ErrorCode::kParse,
          "generation.current_steps must lie in [0, horizon]");
  require(g.probes >= 0 && g.probes <= c.spec.system.state_dim(), ErrorCode::kParse,
          "generation.probes must lie in [0, n]");
  require(g.probe_horizon >= 0, ErrorCode::kParse, "generation.probe_horizon must be >= 0");
  const int probe_n = g.probe_horizon > 0 ? g.probe_horizon : n;
  require(g.probe_steps >= 0 && g.probe_steps <= probe_n, ErrorCode::kParse,
          "generation.probe_steps must lie in [0, probe horizon]");
  require(g.initial_spread >= 0.0, ErrorCode::kParse, "generation.initial_spread must be >= 0");
}

Trajectory head(const Trajectory& t, int count) {
  Trajectory out;
  out.outputs.assign(t.outputs.begin(), t.outputs.begin() + count + 1);
  out.contains_final_state = false;
  return out;
}

// Unit directions along the real eigenvectors (or real parts) of the first
// closed loop A - B K_0, largest modulus first.
std::vector<VectorXd> probe_directions(const LinearSystem& sys, const MatrixXd& k0, int count) {
  Eigen::EigenSolver<MatrixXd> es(sys.A - sys.B * k0);
  const auto vals = es.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(vals.size()));
  for (Eigen::Index i = 0; i < vals.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(vals(a)) > std::abs(vals(b));
  });
  std::vector<VectorXd> dirs;
  for (Eigen::Index idx : order) {
    if (static_cast<int>(dirs.size()) == count) break;
    const Eigen::VectorXcd v = es.eigenvectors().col(idx);
    VectorXd d = v.real();
    if (d.norm() < 1e-12) d = v.imag();
    dirs.push_back(d.normalized());
  }
  return dirs;
}

std::string csv_name(const char* prefix, std::size_t i) {
  std::ostringstream os;
  os << prefix << '_' << std::setw(3) << std::setfill('0') << i << ".csv";
  return os.str();
}

Trajectory load_one(const std::filesystem::path& path, bool flag) {
  std::vector<Trajectory> ts = trajectories_from_csv(read_text_file(path));
  require(ts.size() == 1, ErrorCode::kParse, path.string() + ": expected one trajectory");
  ts[0].contains_final_state = flag;
  return ts[0];
}

}  // namespace

LinearSystem system_from_json(const std::string& text) { return parse_system(parse_text(text)); }
std::string system_to_json(const LinearSystem& sys) { return system_json(sys).dump(2); }
LQRObjective objective_from_json(const std::string& text) {
  return parse_objective(parse_text(text));
}
std::string objective_to_json(const LQRObjective& obj) { return objective_json(obj).dump(2); }
LQRProblemSpec spec_from_json(const std::string& text) { return parse_spec(parse_text(text)); }
std::string spec_to_json(const LQRProblemSpec& spec) { return spec_json(spec).dump(2); }

std::string report_to_json(const ReconstructionReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["setting"] = to_string(r.setting);
  j["ok"] = r.ok();
  j["completed_stages"] = r.completed_stages;
  if (!r.ok()) {
    j["failed_stage"] = r.failed_stage;
    j["error"] = {{"code", static_cast<int>(r.error_code)},
                  {"name", to_string(r.error_code)},
                  {"message", r.error_message}};
  }
  j["target"] = {{"method", r.target_method}, {"value", vector_json(r.target)}, {"gap", r.target_gap}};

  json w = {{"method", r.weights_method}, {"H", matrix_json(r.H)}, {"Q", matrix_json(r.Q)},
            {"R", matrix_json(r.R)},      {"tau", r.tau},         {"scale_note", r.scale_note}};
  if (r.alpha) w["alpha"] = *r.alpha;
  if (!r.weights_note.empty()) w["note"] = r.weights_note;
  if (r.setting == Setting::kFinalStateOnly) {
    w["problem1"] = {{"residual", r.problem1_residual},
                     {"iterations", r.problem1_iterations},
                     {"converged", r.problem1_converged},
                     {"message", r.problem1_message}};
  } else {
    json ge = {{"suffix", r.gain_suffix}, {"gram_min_sv", r.gain_gram_min_sv}};
    json gains = json::array();
    for (const auto& k : r.estimated_gains) gains.push_back(matrix_json(k));
    ge["gains"] = std::move(gains);
    w["gain_estimation"] = std::move(ge);
    if (r.feasibility) {
      const auto& f = *r.feasibility;
      w["feasibility"] = {{"decision", to_string(f.decision)},
                          {"reduced_rank", f.reduced_rank},
                          {"reduced_unknowns", f.reduced_unknowns},
                          {"replicated_rank", f.replicated_rank},
                          {"full_matrix_threshold", f.full_matrix_threshold},
                          {"singular_values", f.singular_values}};
    }
    if (r.identifiability) {
      w["identifiability"] = {{"count", r.identifiability->count},
                              {"threshold", r.identifiability->threshold},
                              {"identifiable", r.identifiability->identifiable}};
    }
  }
  j["weights"] = std::move(w);

  json evals = json::array();
  for (const auto& [n, v] : r.horizon_evaluations) evals.push_back({n, v});
  json bounds = json::array();
  for (const auto& [lo, hi] : r.horizon_bounds) bounds.push_back({lo, hi});
  j["horizon"] = {{"n_star", r.n_star}, {"theta", r.theta}, {"bounds", bounds}, {"evaluations", evals}};

  j["observed_steps"] = r.observed_steps;
  j["current_state"] = vector_json(r.current_state);
  j["current_covariance"] = matrix_json(r.current_covariance);
  j["remaining_horizon"] = r.remaining_horizon;
  j["mu0"] = vector_json(r.mu0);
  j["forecast"] = vectors_json(r.forecast);
  return j.dump(2);
}

std::string trajectories_to_csv(const std::vector<Trajectory>& trajs, int first_id) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  Eigen::Index p = 0;
  for (const auto& t : trajs) {
    if (!t.outputs.empty()) {
      p = t.outputs.front().size();
      break;
    }
  }
  os << "traj_id,t";
  for (Eigen::Index i = 1; i <= p; ++i) os << ",y" << i;
  os << '\n';
  for (std::size_t id = 0; id < trajs.size(); ++id) {
    const auto& outs = trajs[id].outputs;
    for (std::size_t t = 0; t < outs.size(); ++t) {
      require(outs[t].size() == p, ErrorCode::kStructural, "outputs differ in dimension");
      os << first_id + static_cast<int>(id) << ',' << t;
      for (Eigen::Index i = 0; i < p; ++i) os << ',' << outs[t](i);
      os << '\n';
    }
  }
  return os.str();
}

std::vector<Trajectory> trajectories_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, "CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  require(header.size() >= 3 && header[0] == "traj_id" && header[1] == "t", ErrorCode::kParse,
          "CSV: header must be traj_id,t,y1..yp");
  const std::size_t p = header.size() - 2;
  for (std::size_t i = 0; i < p; ++i) {
    require(header[i + 2] == "y" + std::to_string(i + 1), ErrorCode::kParse,
            "CSV: unexpected column '" + header[i + 2] + "'");
  }

  std::vector<Trajectory> out;
  std::map<long, std::size_t> index;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    const std::string where = "CSV line " + std::to_string(lineno);
    require(cells.size() == p + 2, ErrorCode::kParse, where + ": wrong number of columns");
    long id = 0;
    long t = 0;
    VectorXd y(static_cast<Eigen::Index>(p));
    try {
      std::size_t used = 0;
      id = std::stol(cells[0], &used);
      require(used == cells[0].size(), ErrorCode::kParse, where + ": bad traj_id");
      t = std::stol(cells[1], &used);
      require(used == cells[1].size(), ErrorCode::kParse, where + ": bad t");
      for (std::size_t i = 0; i < p; ++i) {
        y(static_cast<Eigen::Index>(i)) = std::stod(cells[i + 2], &used);
        require(used == cells[i + 2].size(), ErrorCode::kParse, where + ": bad number");
      }
    } catch (const std::logic_error&) {
      fail(ErrorCode::kParse, where + ": bad number");
    }
    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) out.emplace_back();
    Trajectory& traj = out[it->second];
    require(t == static_cast<long>(traj.outputs.size()), ErrorCode::kParse,
            where + ": t must count up from 0 within each traj_id");
    traj.outputs.push_back(std::move(y));
  }
  return out;
}

DatasetConfig dataset_config_from_json(const std::string& text) {
  const json j = parse_text(text);
  DatasetConfig c;
  c.spec = parse_spec(j);
  c.generation = parse_generation(j.contains("generation") ? j.at("generation") : json());
  check_generation(c);
  return c;
}

Dataset generate_dataset(const DatasetConfig& config, std::uint64_t seed) {
  config.spec.check();
  check_generation(config);
  const LQRProblemSpec& spec = config.spec;
  const GenerationConfig& g = config.generation;
  const int n = spec.system.state_dim();
  const int horizon = spec.horizon;
  const RiccatiTrace trace = riccati_gains(spec);

  Dataset data;
  data.config = config;
  data.seed = seed;

  GaussianRng starts(derive_seed(seed, 1));
  const int h_lo = g.history_horizon_min > 0 ? g.history_horizon_min : horizon;
  const int h_hi = g.history_horizon_max > 0 ? g.history_horizon_max : horizon;
  const RiccatiTrace history_trace = h_hi > horizon ? riccati_gains(spec.system, spec.objective, h_hi) : trace;
  for (int j = 0; j < g.trajectories; ++j) {
    LQRProblemSpec s = spec;
    s.initial = spec.target;
    for (int i = 0; i < n; ++i) s.initial(i) += starts.uniform(-g.initial_spread, g.initial_spread);
    s.horizon = h_lo;
    if (h_hi > h_lo) {
      const int span = h_hi - h_lo + 1;
      s.horizon += std::min(span - 1, static_cast<int>(starts.uniform() * span));
    }
    // The last N_j gains of a longer sequence are the horizon-N_j gains.
    const auto& all = history_trace.gains.gains;
    GainSequence gains;
    gains.gains.assign(all.end() - s.horizon, all.end());
    const Trajectory full =
        simulate(s, gains, derive_seed(seed, 100 + static_cast<std::uint64_t>(j))).observed(true);
    const int keep = g.history_length > 0 ? g.history_length : s.horizon;
    data.history.trajectories.push_back(g.final_state ? full.suffix(keep) : head(full, keep));
  }

  const SimulationResult cur = simulate(spec, trace.gains, derive_seed(seed, 2));
  for (const auto& x : cur.states) data.current_states.push_back(x + spec.target);
  data.current_inputs = cur.inputs;
  data.current = head(cur.observed(false), g.current_steps);

  if (g.probes > 0) {
    LQRProblemSpec s = spec;
    if (g.probe_horizon > 0) s.horizon = g.probe_horizon;
    const RiccatiTrace probe_trace = riccati_gains(s);
    int steps = g.probe_steps > 0 ? g.probe_steps : (g.current_steps > 0 ? g.current_steps : horizon);
    steps = std::min(steps, s.horizon);
    const auto dirs = probe_directions(spec.system, probe_trace.gains[0], g.probes);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      s.initial = spec.target + g.probe_scale * dirs[i];
      const Trajectory full = simulate(s, probe_trace.gains, derive_seed(seed, 200 + static_cast<std::uint64_t>(i)))
                                  .observed(false);
      data.probes.trajectories.push_back(head(full, steps));
    }
  }
  return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  json m = spec_json(data.config.spec);
  m["schema_version"] = kReportSchemaVersion;
  m["seed"] = data.seed;
  m["generation"] = generation_json(data.config.generation);
  json hist = json::array();
  for (std::size_t i = 0; i < data.history.size(); ++i) {
    const auto& t = data.history.trajectories[i];
    const std::string name = csv_name("history", i);
    write_text_file(dir / name, trajectories_to_csv({t}, static_cast<int>(i)));
    hist.push_back({{"file", name}, {"contains_final_state", t.contains_final_state}});
  }
  m["history"] = std::move(hist);
  json probes = json::array();
  for (std::size_t i = 0; i < data.probes.size(); ++i) {
    const std::string name = csv_name("probe", i);
    write_text_file(dir / name, trajectories_to_csv({data.probes.trajectories[i]}, static_cast<int>(i)));
    probes.push_back({{"file", name}});
  }
  m["probes"] = std::move(probes);
  if (!data.current.outputs.empty()) {
    write_text_file(dir / "current.csv", trajectories_to_csv({data.current}));
    m["current"] = {{"file", "current.csv"}, {"observed_steps", data.current.length()}};
  }
  m["truth"] = {{"states", vectors_json(data.current_states)},
                {"inputs", vectors_json(data.current_inputs)}};
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const json m = parse_text(read_text_file(dir / "manifest.json"));
  Dataset data;
  data.config.spec = parse_spec(m);
  data.config.generation = parse_generation(m.contains("generation") ? m.at("generation") : json());
  if (m.contains("seed")) data.seed = m.at("seed").get<std::uint64_t>();
  if (m.contains("history")) {
    for (const auto& h : m.at("history")) {
      const bool flag = h.contains("contains_final_state") && h.at("contains_final_state").get<bool>();
      data.history.trajectories.push_back(load_one(dir / field(h, "file").get<std::string>(), flag));
    }
  }
  if (m.contains("probes")) {
    for (const auto& p : m.at("probes")) {
      data.probes.trajectories.push_back(load_one(dir / field(p, "file").get<std::string>(), false));
    }
  }
  if (m.contains("current")) {
    data.current = load_one(dir / field(m.at("current"), "file").get<std::string>(), false);
  }
  if (m.contains("truth")) {
    const json& t = m.at("truth");
    if (t.contains("states")) {
      for (const auto& v : t.at("states")) data.current_states.push_back(parse_vector(v, "truth.states"));
    }
    if (t.contains("inputs")) {
      for (const auto& v : t.at("inputs")) data.current_inputs.push_back(parse_vector(v, "truth.inputs"));
    }
  }
  return data;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "read failed: " + path.string());
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace lqr_recon
