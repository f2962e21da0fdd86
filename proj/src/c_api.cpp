#include "lqr_recon/lqr_recon.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "lqr_recon/bench.hpp"
#include "lqr_recon/error.hpp"
#include "lqr_recon/io.hpp"
#include "lqr_recon/lqr_forward.hpp"
#include "lqr_recon/model.hpp"
#include "lqr_recon/pipeline.hpp"

struct lqrr_system {
  lqr_recon::LinearSystem value;
};
struct lqrr_objective {
  lqr_recon::LQRObjective value;
};
struct lqrr_dataset {
  lqr_recon::Dataset value;
};
struct lqrr_report {
  lqr_recon::ReconstructionReport value;
};

namespace {

using lqr_recon::MatrixXd;
using lqr_recon::VectorXd;

thread_local std::string last_error;

lqrr_status record(lqrr_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, mapping exceptions to status codes.
template <typename Fn>
lqrr_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const lqr_recon::Error& e) {
    return record(static_cast<lqrr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(LQRR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(LQRR_ERR_INTERNAL, e.what());
  }
}

MatrixXd from_row_major(const double* p, int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = p[i * cols + j];
  }
  return m;
}

void to_row_major(const MatrixXd& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int copy_vector(const VectorXd& v, double* out, int len) {
  const int n = static_cast<int>(v.size());
  if (out != nullptr) {
    for (int i = 0; i < n && i < len; ++i) out[i] = v(i);
  }
  return n;
}

#define LQRR_REQUIRE_ARG(p) \
  if ((p) == nullptr) return record(LQRR_ERR_NULL_ARGUMENT, #p " is NULL")

}  // namespace

extern "C" {

const char* lqrr_version(void) { return "0.1.0"; }

const char* lqrr_status_name(lqrr_status status) {
  switch (status) {
    case LQRR_OK: return "ok";
    case LQRR_ERR_INTERNAL: return "internal";
    case LQRR_ERR_NULL_ARGUMENT: return "null-argument";
    default:
      if (status >= LQRR_ERR_STRUCTURAL && status <= LQRR_ERR_PARSE) {
        return lqr_recon::to_string(static_cast<lqr_recon::ErrorCode>(status));
      }
      return "unknown";
  }
}

const char* lqrr_last_error(void) { return last_error.c_str(); }

void lqrr_string_free(char* s) { std::free(s); }

lqrr_status lqrr_system_create(int n, int m, const double* a, const double* b, const double* c,
                               const double* noise_std, lqrr_system** out) {
  LQRR_REQUIRE_ARG(a);
  LQRR_REQUIRE_ARG(b);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  if (n <= 0 || m <= 0) return record(LQRR_ERR_STRUCTURAL, "dimensions must be positive");
  return guarded([&] {
    lqr_recon::LinearSystem sys;
    sys.A = from_row_major(a, n, n);
    sys.B = from_row_major(b, n, m);
    sys.C = c ? from_row_major(c, n, n) : MatrixXd::Identity(n, n);
    sys.noise_std = noise_std ? VectorXd(Eigen::Map<const VectorXd>(noise_std, n)) : VectorXd::Zero(n);
    sys.check_dimensions();
    *out = new lqrr_system{std::move(sys)};
    return LQRR_OK;
  });
}

lqrr_status lqrr_system_from_json(const char* json, lqrr_system** out) {
  LQRR_REQUIRE_ARG(json);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new lqrr_system{lqr_recon::system_from_json(json)};
    return LQRR_OK;
  });
}

lqrr_status lqrr_system_to_json(const lqrr_system* sys, char** out) {
  LQRR_REQUIRE_ARG(sys);
  LQRR_REQUIRE_ARG(out);
  return guarded([&] {
    *out = dup_string(lqr_recon::system_to_json(sys->value));
    return LQRR_OK;
  });
}

void lqrr_system_free(lqrr_system* sys) { delete sys; }

int lqrr_system_state_dim(const lqrr_system* sys) { return sys ? sys->value.state_dim() : 0; }
int lqrr_system_input_dim(const lqrr_system* sys) { return sys ? sys->value.input_dim() : 0; }

lqrr_status lqrr_system_validate(const lqrr_system* sys, int* passed, char** details) {
  LQRR_REQUIRE_ARG(sys);
  LQRR_REQUIRE_ARG(passed);
  return guarded([&] {
    const lqr_recon::ValidationReport rep = lqr_recon::validate_system(sys->value);
    *passed = rep.passed() ? 1 : 0;
    if (details != nullptr) {
      std::ostringstream os;
      os << "controllability_rank " << rep.controllability_rank << " (min sv "
         << rep.controllability_min_sv << ")\n"
         << "b_rank " << rep.b_rank << " (min sv " << rep.b_min_sv << ")\n"
         << "a_min_sv " << rep.a_min_sv << "\n"
         << "c_min_sv " << rep.c_min_sv << "\n";
      for (const auto& f : rep.failures) os << "failure: " << f << "\n";
      *details = dup_string(os.str());
    }
    return LQRR_OK;
  });
}

lqrr_status lqrr_objective_create(int n, int m, const double* h, const double* q, const double* r,
                                  lqrr_setting setting, lqrr_objective** out) {
  LQRR_REQUIRE_ARG(r);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  if (n <= 0 || m <= 0) return record(LQRR_ERR_STRUCTURAL, "dimensions must be positive");
  return guarded([&] {
    const MatrixXd rm = from_row_major(r, m, m);
    lqr_recon::LQRObjective obj;
    if (setting == LQRR_SETTING_FINAL_STATE) {
      obj = lqr_recon::LQRObjective::final_state_only(rm, n);
      if (h) obj.H = from_row_major(h, n, n);
      if (q) obj.Q = from_row_major(q, n, n);
    } else {
      if (h == nullptr || q == nullptr) {
        lqr_recon::fail(lqr_recon::ErrorCode::kStructural, "classic objective needs H and Q");
      }
      obj = lqr_recon::LQRObjective::classic(from_row_major(h, n, n), from_row_major(q, n, n), rm);
    }
    obj.check(n, m);
    *out = new lqrr_objective{std::move(obj)};
    return LQRR_OK;
  });
}

lqrr_status lqrr_objective_from_json(const char* json, lqrr_objective** out) {
  LQRR_REQUIRE_ARG(json);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new lqrr_objective{lqr_recon::objective_from_json(json)};
    return LQRR_OK;
  });
}

void lqrr_objective_free(lqrr_objective* obj) { delete obj; }

lqrr_status lqrr_riccati_gains(const lqrr_system* sys, const lqrr_objective* obj, int horizon,
                               double* gains_out) {
  LQRR_REQUIRE_ARG(sys);
  LQRR_REQUIRE_ARG(obj);
  LQRR_REQUIRE_ARG(gains_out);
  return guarded([&] {
    const lqr_recon::RiccatiTrace trace = lqr_recon::riccati_gains(sys->value, obj->value, horizon);
    const int block = sys->value.input_dim() * sys->value.state_dim();
    for (int k = 0; k < horizon; ++k) to_row_major(trace.gains[k], gains_out + k * block);
    return LQRR_OK;
  });
}

lqrr_status lqrr_dare(const lqrr_system* sys, const lqrr_objective* obj, double* p_out,
                      double* k_out) {
  LQRR_REQUIRE_ARG(sys);
  LQRR_REQUIRE_ARG(obj);
  return guarded([&] {
    const lqr_recon::DareSolution sol = lqr_recon::solve_dare(sys->value, obj->value.Q, obj->value.R);
    if (p_out) to_row_major(sol.P, p_out);
    if (k_out) to_row_major(sol.K, k_out);
    return LQRR_OK;
  });
}

lqrr_status lqrr_dataset_generate(const char* config_json, uint64_t seed, int trajectories,
                                  lqrr_dataset** out) {
  LQRR_REQUIRE_ARG(config_json);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    lqr_recon::DatasetConfig cfg = lqr_recon::dataset_config_from_json(config_json);
    if (trajectories >= 0) cfg.generation.trajectories = trajectories;
    *out = new lqrr_dataset{lqr_recon::generate_dataset(cfg, seed)};
    return LQRR_OK;
  });
}

lqrr_status lqrr_dataset_write(const lqrr_dataset* data, const char* dir) {
  LQRR_REQUIRE_ARG(data);
  LQRR_REQUIRE_ARG(dir);
  return guarded([&] {
    lqr_recon::write_dataset(data->value, dir);
    return LQRR_OK;
  });
}

lqrr_status lqrr_dataset_load(const char* dir, lqrr_dataset** out) {
  LQRR_REQUIRE_ARG(dir);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new lqrr_dataset{lqr_recon::read_dataset(dir)};
    return LQRR_OK;
  });
}

void lqrr_dataset_free(lqrr_dataset* data) { delete data; }

int lqrr_dataset_history_count(const lqrr_dataset* data) {
  return data ? static_cast<int>(data->value.history.size()) : 0;
}
int lqrr_dataset_probe_count(const lqrr_dataset* data) {
  return data ? static_cast<int>(data->value.probes.size()) : 0;
}
int lqrr_dataset_observed_steps(const lqrr_dataset* data) {
  return data ? data->value.current.length() : 0;
}
int lqrr_dataset_true_horizon(const lqrr_dataset* data) {
  return data ? data->value.config.spec.horizon : 0;
}

lqrr_status lqrr_dataset_system(const lqrr_dataset* data, lqrr_system** out) {
  LQRR_REQUIRE_ARG(data);
  LQRR_REQUIRE_ARG(out);
  return guarded([&] {
    *out = new lqrr_system{data->value.config.spec.system};
    return LQRR_OK;
  });
}

void lqrr_pipeline_options_init(lqrr_pipeline_options* options) {
  if (options == nullptr) return;
  const lqr_recon::PipelineOptions defaults;
  options->setting = LQRR_SETTING_CLASSIC;
  options->theta = defaults.theta;
  options->window = defaults.window;
  options->gain_suffix = defaults.gain_suffix;
  options->use_probes = 1;
}

lqrr_status lqrr_run_pipeline(const lqrr_dataset* data, const lqrr_pipeline_options* options,
                              lqrr_report** out) {
  LQRR_REQUIRE_ARG(data);
  LQRR_REQUIRE_ARG(options);
  LQRR_REQUIRE_ARG(out);
  *out = nullptr;
  return guarded([&] {
    lqr_recon::PipelineOptions opts;
    opts.setting = options->setting == LQRR_SETTING_FINAL_STATE ? lqr_recon::Setting::kFinalStateOnly
                                                                : lqr_recon::Setting::kClassic;
    opts.theta = options->theta;
    opts.window = options->window;
    opts.gain_suffix = options->gain_suffix;
    if (options->use_probes) opts.target_probes = data->value.probes;
    const auto& d = data->value;
    auto* rep = new lqrr_report{lqr_recon::run_pipeline(d.history, d.current, d.config.spec.system, opts)};
    *out = rep;
    if (rep->value.ok()) return LQRR_OK;
    return record(static_cast<lqrr_status>(rep->value.error_code),
                  rep->value.failed_stage + ": " + rep->value.error_message);
  });
}

void lqrr_report_free(lqrr_report* report) { delete report; }

const char* lqrr_report_failed_stage(const lqrr_report* report) {
  return report ? report->value.failed_stage.c_str() : "";
}

int lqrr_report_n_star(const lqrr_report* report) { return report ? report->value.n_star : 0; }

int lqrr_report_mu0(const lqrr_report* report, double* out, int len) {
  return report ? copy_vector(report->value.mu0, out, len) : 0;
}

int lqrr_report_target(const lqrr_report* report, double* out, int len) {
  return report ? copy_vector(report->value.target, out, len) : 0;
}

lqrr_status lqrr_report_to_json(const lqrr_report* report, char** out) {
  LQRR_REQUIRE_ARG(report);
  LQRR_REQUIRE_ARG(out);
  return guarded([&] {
    *out = dup_string(lqr_recon::report_to_json(report->value));
    return LQRR_OK;
  });
}

lqrr_status lqrr_bench_run(const char* sweep_json, const char* out_dir, int jobs, char** summary) {
  LQRR_REQUIRE_ARG(sweep_json);
  LQRR_REQUIRE_ARG(out_dir);
  return guarded([&] {
    const auto outputs = lqr_recon::run_bench(sweep_json, out_dir, jobs);
    if (summary != nullptr) {
      std::ostringstream os;
      for (const auto& o : outputs) os << o.name << ',' << o.rows << ',' << o.path.string() << '\n';
      *summary = dup_string(os.str());
    }
    return LQRR_OK;
  });
}

}  // extern "C"
