#include "stlcp/stlcp.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "stlcp/conformal.hpp"
#include "stlcp/error.hpp"
#include "stlcp/formula.hpp"
#include "stlcp/harness.hpp"
#include "stlcp/io.hpp"
#include "stlcp/parser.hpp"
#include "stlcp/predictors.hpp"
#include "stlcp/semantics.hpp"
#include "stlcp/verify.hpp"

struct stlcp_formula {
  stlcp::Formula f;
};
struct stlcp_dataset {
  stlcp::Dataset d;
};
struct stlcp_predictor {
  stlcp::Predictor p;
};
struct stlcp_calibration {
  stlcp::Calibration c;
};
struct stlcp_verdict {
  stlcp::Verdict v;
};
struct stlcp_report {
  stlcp::EvalReport r;
};

namespace {

thread_local std::string g_last_error;
thread_local int64_t g_last_position = -1;

stlcp_status to_status(stlcp::ErrorCode code) {
  using stlcp::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return STLCP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return STLCP_ERR_PARSE;
    case ErrorCode::Unbounded: return STLCP_ERR_UNBOUNDED;
    case ErrorCode::SignalTooShort: return STLCP_ERR_SIGNAL_TOO_SHORT;
    case ErrorCode::DimensionMismatch: return STLCP_ERR_DIMENSION;
    case ErrorCode::NotPnf: return STLCP_ERR_NOT_PNF;
    case ErrorCode::NormMismatch: return STLCP_ERR_NORM_MISMATCH;
    case ErrorCode::HorizonExceeded: return STLCP_ERR_HORIZON;
    case ErrorCode::MissingId: return STLCP_ERR_MISSING_ID;
    case ErrorCode::Io: return STLCP_ERR_IO;
    case ErrorCode::Format: return STLCP_ERR_FORMAT;
    case ErrorCode::CalibrationMismatch: return STLCP_ERR_CALIBRATION_MISMATCH;
    case ErrorCode::Internal: return STLCP_ERR_INTERNAL;
  }
  return STLCP_ERR_INTERNAL;
}

stlcp_status fail(stlcp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
stlcp_status guarded(Fn&& fn) {
  g_last_error.clear();
  g_last_position = -1;
  try {
    fn();
    return STLCP_OK;
  } catch (const stlcp::ParseError& e) {
    g_last_position = static_cast<int64_t>(e.position());
    return fail(STLCP_ERR_PARSE, e.what());
  } catch (const stlcp::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(STLCP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(STLCP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(STLCP_ERR_INTERNAL, "unknown exception");
  }
}

template <class... Ptrs>
void require(Ptrs... ptrs) {
  if (((ptrs == nullptr) || ...)) {
    throw stlcp::Error(stlcp::ErrorCode::InvalidArgument, "null argument");
  }
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

stlcp::Norm to_norm(stlcp_norm n) { return n == STLCP_NORM_LINF ? stlcp::Norm::Linf : stlcp::Norm::L2; }

stlcp::Method to_method(stlcp_method m) {
  return m == STLCP_METHOD_INDIRECT ? stlcp::Method::Indirect : stlcp::Method::Direct;
}

const stlcp::Trajectory& trajectory_at(const stlcp_dataset* d, size_t index) {
  if (index >= d->d.trajectories.size()) {
    throw stlcp::Error(stlcp::ErrorCode::InvalidArgument,
                       "trajectory index " + std::to_string(index) + " out of range");
  }
  return d->d.trajectories[index];
}

void tree_dump(const stlcp::Formula& f, int depth, std::string& out) {
  out.append(static_cast<size_t>(depth) * 2, ' ');
  out += stlcp::node_kind_name(f.kind());
  if (stlcp::is_temporal(f.kind())) {
    out += " [" + std::to_string(f.interval().lo) + "," +
           (f.interval().bounded() ? std::to_string(f.interval().hi) : std::string("inf")) + "]";
  }
  if (f.kind() == stlcp::NodeKind::Predicate) out += " " + stlcp::render(f);
  out += "\n";
  for (size_t i = 0; i < f.arity(); ++i) tree_dump(f.child(i), depth + 1, out);
}

stlcp::MonitorSetup setup_for(const stlcp::Formula& f, const stlcp_dataset* d, int64_t tau0,
                              int64_t t, stlcp::Method method) {
  stlcp::MonitorSetup s{method == stlcp::Method::Indirect ? stlcp::to_pnf(f) : f, d->d.schema,
                        tau0, t};
  return s;
}

}  // namespace

extern "C" {

const char* stlcp_version(void) { return "0.1.0"; }
const char* stlcp_last_error(void) { return g_last_error.c_str(); }
int64_t stlcp_last_error_position(void) { return g_last_position; }

const char* stlcp_status_name(stlcp_status status) {
  switch (status) {
    case STLCP_OK: return "ok";
    case STLCP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case STLCP_ERR_PARSE: return "parse error";
    case STLCP_ERR_UNBOUNDED: return "unbounded formula";
    case STLCP_ERR_SIGNAL_TOO_SHORT: return "signal too short";
    case STLCP_ERR_DIMENSION: return "dimension mismatch";
    case STLCP_ERR_NOT_PNF: return "formula not in positive normal form";
    case STLCP_ERR_NORM_MISMATCH: return "norm mismatch";
    case STLCP_ERR_HORIZON: return "horizon exceeded";
    case STLCP_ERR_MISSING_ID: return "missing trajectory id";
    case STLCP_ERR_IO: return "i/o error";
    case STLCP_ERR_FORMAT: return "format error";
    case STLCP_ERR_CALIBRATION_MISMATCH: return "calibration mismatch";
    case STLCP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void stlcp_string_free(char* s) { std::free(s); }

/* formulas */

stlcp_status stlcp_formula_parse(const char* text, stlcp_formula** out) {
  return guarded([&] {
    require(text, out);
    *out = new stlcp_formula{stlcp::parse(text)};
  });
}

stlcp_status stlcp_formula_parse_internal(const char* text, stlcp_formula** out) {
  return guarded([&] {
    require(text, out);
    *out = new stlcp_formula{stlcp::parse(text, stlcp::ParseOptions{true})};
  });
}

void stlcp_formula_free(stlcp_formula* f) { delete f; }

stlcp_status stlcp_formula_render(const stlcp_formula* f, char** out) {
  return guarded([&] {
    require(f, out);
    *out = copy_string(stlcp::render(f->f));
  });
}

stlcp_status stlcp_formula_hash(const stlcp_formula* f, char** out) {
  return guarded([&] {
    require(f, out);
    *out = copy_string(stlcp::formula_hash(f->f));
  });
}

stlcp_status stlcp_formula_length(const stlcp_formula* f, int64_t* out) {
  return guarded([&] {
    require(f, out);
    *out = stlcp::formula_length(f->f);
  });
}

stlcp_status stlcp_formula_is_bounded(const stlcp_formula* f, int* out) {
  return guarded([&] {
    require(f, out);
    *out = stlcp::is_bounded(f->f) ? 1 : 0;
  });
}

stlcp_status stlcp_formula_is_pnf(const stlcp_formula* f, int* out) {
  return guarded([&] {
    require(f, out);
    *out = stlcp::is_pnf(f->f) ? 1 : 0;
  });
}

stlcp_status stlcp_formula_node_count(const stlcp_formula* f, size_t* out) {
  return guarded([&] {
    require(f, out);
    *out = stlcp::node_count(f->f);
  });
}

stlcp_status stlcp_formula_to_pnf(const stlcp_formula* f, stlcp_formula** out) {
  return guarded([&] {
    require(f, out);
    *out = new stlcp_formula{stlcp::to_pnf(f->f)};
  });
}

stlcp_status stlcp_formula_truncate(const stlcp_formula* f, int64_t bound, stlcp_formula** out) {
  return guarded([&] {
    require(f, out);
    *out = new stlcp_formula{stlcp::truncate_unbounded(f->f, bound)};
  });
}

stlcp_status stlcp_formula_tree(const stlcp_formula* f, char** out) {
  return guarded([&] {
    require(f, out);
    std::string s;
    tree_dump(f->f, 0, s);
    *out = copy_string(s);
  });
}

stlcp_status stlcp_horizon(int64_t tau0, int64_t t, int64_t length, int64_t* out) {
  return guarded([&] {
    require(out);
    *out = stlcp::horizon(tau0, t, length).horizon;
  });
}

/* datasets */

stlcp_status stlcp_dataset_load(const char* path, stlcp_dataset** out) {
  return guarded([&] {
    require(path, out);
    *out = new stlcp_dataset{stlcp::read_trajectories(path)};
  });
}

stlcp_status stlcp_dataset_save(const stlcp_dataset* d, const char* path) {
  return guarded([&] {
    require(d, path);
    stlcp::write_trajectories(path, d->d);
  });
}

stlcp_status stlcp_dataset_from_array(const char* id, const double* values, size_t length,
                                      size_t dim, const char* const* names, stlcp_dataset** out) {
  return guarded([&] {
    require(id, values, out);
    if (length == 0 || dim == 0) {
      throw stlcp::Error(stlcp::ErrorCode::InvalidArgument, "length and dim must be >= 1");
    }
    stlcp::Dataset d;
    if (names) {
      for (size_t i = 0; i < dim; ++i) {
        require(names[i]);
        d.schema.names.emplace_back(names[i]);
      }
    } else {
      d.schema = stlcp::Schema::numbered(dim);
    }
    d.trajectories.push_back(
        stlcp::Trajectory{id, stlcp::Signal(dim, std::vector<double>(values, values + length * dim))});
    *out = new stlcp_dataset{std::move(d)};
  });
}

stlcp_status stlcp_dataset_generate(const char* system, size_t count, uint64_t seed,
                                    stlcp_dataset** out) {
  return guarded([&] {
    require(system, out);
    auto sys = stlcp::SyntheticSystem::preset(stlcp::parse_system(system));
    *out = new stlcp_dataset{stlcp::Dataset{sys.schema(), stlcp::generate(sys, count, seed)}};
  });
}

stlcp_status stlcp_dataset_split(const stlcp_dataset* d, size_t n_train, size_t n_val,
                                 size_t n_test, stlcp_dataset** train, stlcp_dataset** val,
                                 stlcp_dataset** test) {
  return guarded([&] {
    require(d, train, val, test);
    auto split = stlcp::split_dataset(d->d.trajectories, n_train, n_val, n_test);
    auto a = std::make_unique<stlcp_dataset>(stlcp_dataset{{d->d.schema, std::move(split.train)}});
    auto b = std::make_unique<stlcp_dataset>(stlcp_dataset{{d->d.schema, std::move(split.val)}});
    auto c = std::make_unique<stlcp_dataset>(stlcp_dataset{{d->d.schema, std::move(split.test)}});
    *train = a.release();
    *val = b.release();
    *test = c.release();
  });
}

void stlcp_dataset_free(stlcp_dataset* d) { delete d; }

stlcp_status stlcp_dataset_size(const stlcp_dataset* d, size_t* out) {
  return guarded([&] {
    require(d, out);
    *out = d->d.trajectories.size();
  });
}

stlcp_status stlcp_dataset_dim(const stlcp_dataset* d, size_t* out) {
  return guarded([&] {
    require(d, out);
    *out = d->d.schema.dim();
  });
}

stlcp_status stlcp_dataset_length(const stlcp_dataset* d, size_t index, size_t* out) {
  return guarded([&] {
    require(d, out);
    *out = trajectory_at(d, index).states.length();
  });
}

stlcp_status stlcp_dataset_find(const stlcp_dataset* d, const char* id, size_t* out) {
  return guarded([&] {
    require(d, id, out);
    const auto& ts = d->d.trajectories;
    for (size_t i = 0; i < ts.size(); ++i) {
      if (ts[i].id == id) {
        *out = i;
        return;
      }
    }
    throw stlcp::Error(stlcp::ErrorCode::MissingId, std::string("no trajectory with id '") + id + "'");
  });
}

stlcp_status stlcp_dataset_id(const stlcp_dataset* d, size_t index, char** out) {
  return guarded([&] {
    require(d, out);
    *out = copy_string(trajectory_at(d, index).id);
  });
}

/* semantics */

stlcp_status stlcp_eval_robust(const stlcp_formula* f, const stlcp_dataset* d, size_t index,
                               int64_t tau, double* out) {
  return guarded([&] {
    require(f, d, out);
    *out = stlcp::eval_robust(stlcp::BoundFormula(f->f, d->d.schema), trajectory_at(d, index).states, tau);
  });
}

stlcp_status stlcp_eval_bool(const stlcp_formula* f, const stlcp_dataset* d, size_t index,
                             int64_t tau, int* out) {
  return guarded([&] {
    require(f, d, out);
    *out = stlcp::eval_bool(stlcp::BoundFormula(f->f, d->d.schema), trajectory_at(d, index).states, tau)
               ? 1
               : 0;
  });
}

/* conformal */

stlcp_status stlcp_quantile_region(const double* scores, size_t k, double delta, double* region,
                                   size_t* rank) {
  return guarded([&] {
    require(region, rank);
    if (k > 0) require(scores);
    auto r = stlcp::quantile_region(stlcp::ScoreSet(std::vector<double>(scores, scores + k)), delta);
    *region = r.value;
    *rank = r.rank;
  });
}

/* predictors */

stlcp_status stlcp_predictor_hold_last(stlcp_predictor** out) {
  return guarded([&] {
    require(out);
    *out = new stlcp_predictor{stlcp::Predictor::hold_last()};
  });
}

stlcp_status stlcp_predictor_fit_ar(const stlcp_dataset* train, size_t order, int64_t t,
                                    int64_t horizon, stlcp_predictor** out) {
  return guarded([&] {
    require(train, out);
    *out = new stlcp_predictor{stlcp::fit_ar(train->d.trajectories, order, t, horizon)};
  });
}

stlcp_status stlcp_predictor_load_external(const char* path, stlcp_predictor** out) {
  return guarded([&] {
    require(path, out);
    *out = new stlcp_predictor{stlcp::load_external(path)};
  });
}

stlcp_status stlcp_predictor_load(const char* path, stlcp_predictor** out) {
  return guarded([&] {
    require(path, out);
    std::filesystem::path p(path);
    *out = new stlcp_predictor{
        stlcp::parse_predictor_artifact(stlcp::read_file(p), p.parent_path())};
  });
}

stlcp_status stlcp_predictor_save(const stlcp_predictor* p, const char* path) {
  return guarded([&] {
    require(p, path);
    stlcp::write_file(path, stlcp::predictor_artifact(p->p));
  });
}

void stlcp_predictor_free(stlcp_predictor* p) { delete p; }

stlcp_status stlcp_predict(const stlcp_predictor* p, const stlcp_dataset* d, size_t index,
                           int64_t t, int64_t horizon, double* out) {
  return guarded([&] {
    require(p, d, out);
    auto prefix = stlcp::observed_prefix(trajectory_at(d, index), t);
    auto pred = p->p.predict(prefix, horizon);
    std::copy(pred.values().begin(), pred.values().end(), out);
  });
}

/* calibration and verdicts */

stlcp_status stlcp_calibrate_direct(const stlcp_predictor* p, const stlcp_dataset* val,
                                    const stlcp_formula* f, int64_t tau0, int64_t t, double delta,
                                    stlcp_calibration** out) {
  return guarded([&] {
    require(p, val, f, out);
    stlcp::MonitorSetup setup{f->f, val->d.schema, tau0, t};
    *out = new stlcp_calibration{stlcp::calibrate_direct(p->p, val->d.trajectories, setup, delta)};
  });
}

stlcp_status stlcp_calibrate_indirect(const stlcp_predictor* p, const stlcp_dataset* val,
                                      int64_t t, int64_t horizon, double delta, stlcp_norm norm,
                                      stlcp_calibration** out) {
  return guarded([&] {
    require(p, val, out);
    *out = new stlcp_calibration{
        stlcp::calibrate_indirect(p->p, val->d.trajectories, t, horizon, delta, to_norm(norm))};
  });
}

stlcp_status stlcp_calibration_load(const char* path, stlcp_calibration** out) {
  return guarded([&] {
    require(path, out);
    *out = new stlcp_calibration{stlcp::parse_calibration_artifact(stlcp::read_file(path))};
  });
}

stlcp_status stlcp_calibration_save(const stlcp_calibration* c, const char* path) {
  return guarded([&] {
    require(c, path);
    stlcp::write_file(path, stlcp::calibration_artifact(c->c));
  });
}

stlcp_status stlcp_calibration_text(const stlcp_calibration* c, char** out) {
  return guarded([&] {
    require(c, out);
    *out = copy_string(stlcp::calibration_artifact(c->c));
  });
}

void stlcp_calibration_free(stlcp_calibration* c) { delete c; }

stlcp_status stlcp_calibration_method(const stlcp_calibration* c, stlcp_method* out) {
  return guarded([&] {
    require(c, out);
    *out = c->c.method == stlcp::Method::Direct ? STLCP_METHOD_DIRECT : STLCP_METHOD_INDIRECT;
  });
}

stlcp_status stlcp_calibration_rank(const stlcp_calibration* c, size_t* out) {
  return guarded([&] {
    require(c, out);
    *out = c->c.rank();
  });
}

stlcp_status stlcp_calibration_count(const stlcp_calibration* c, size_t* out) {
  return guarded([&] {
    require(c, out);
    *out = c->c.k;
  });
}

stlcp_status stlcp_calibration_region_count(const stlcp_calibration* c, size_t* out) {
  return guarded([&] {
    require(c, out);
    *out = c->c.regions.size();
  });
}

stlcp_status stlcp_calibration_region(const stlcp_calibration* c, size_t index, double* out) {
  return guarded([&] {
    require(c, out);
    if (index >= c->c.regions.size()) {
      throw stlcp::Error(stlcp::ErrorCode::InvalidArgument, "region index out of range");
    }
    *out = c->c.regions[index].value;
  });
}

stlcp_status stlcp_verify(const stlcp_predictor* p, const stlcp_formula* f,
                          const stlcp_calibration* c, const stlcp_dataset* observed, size_t index,
                          int64_t tau0, int64_t t, stlcp_verdict** out) {
  return guarded([&] {
    require(p, f, c, observed, out);
    const auto& x = trajectory_at(observed, index);
    const auto setup = setup_for(f->f, observed, tau0, t, c->c.method);
    auto v = c->c.method == stlcp::Method::Direct ? stlcp::verify_direct(x, p->p, setup, c->c)
                                                  : stlcp::verify_indirect(x, p->p, setup, c->c);
    *out = new stlcp_verdict{std::move(v)};
  });
}

stlcp_status stlcp_min_delta(stlcp_method method, const stlcp_predictor* p,
                             const stlcp_dataset* val, const stlcp_formula* f,
                             const stlcp_dataset* observed, size_t index, int64_t tau0, int64_t t,
                             const double* grid, size_t grid_size, stlcp_norm norm,
                             stlcp_verdict** out) {
  return guarded([&] {
    require(p, val, f, observed, out);
    if (grid_size > 0) require(grid);
    const auto m = to_method(method);
    const auto setup = setup_for(f->f, observed, tau0, t, m);
    if (!(val->d.schema == observed->d.schema)) {
      throw stlcp::Error(stlcp::ErrorCode::DimensionMismatch,
                         "validation and observed data use different components");
    }
    auto res = stlcp::min_delta_search(m, p->p, val->d.trajectories, trajectory_at(observed, index),
                                       setup, std::span<const double>(grid, grid_size), to_norm(norm));
    *out = res ? new stlcp_verdict{std::move(res->verdict)} : nullptr;
  });
}

void stlcp_verdict_free(stlcp_verdict* v) { delete v; }

stlcp_status stlcp_verdict_guaranteed(const stlcp_verdict* v, int* out) {
  return guarded([&] {
    require(v, out);
    *out = v->v.guaranteed ? 1 : 0;
  });
}

stlcp_status stlcp_verdict_robustness(const stlcp_verdict* v, double* out) {
  return guarded([&] {
    require(v, out);
    *out = v->v.robustness;
  });
}

stlcp_status stlcp_verdict_delta(const stlcp_verdict* v, double* out) {
  return guarded([&] {
    require(v, out);
    *out = v->v.delta;
  });
}

stlcp_status stlcp_verdict_record(const stlcp_verdict* v, const char* config_hash, char** out) {
  return guarded([&] {
    require(v, out);
    *out = copy_string(stlcp::verdict_record(v->v, config_hash ? config_hash : ""));
  });
}

stlcp_status stlcp_verdict_diagnostics(const stlcp_verdict* v, char** out) {
  return guarded([&] {
    require(v, out);
    std::string s;
    for (const auto& d : v->v.diagnostics) {
      s += d.label + "\t" + stlcp::format_double(d.min_value) + "\n";
    }
    *out = copy_string(s);
  });
}

/* harness */

void stlcp_eval_options_default(stlcp_eval_options* o) {
  if (!o) return;
  o->method = STLCP_METHOD_DIRECT;
  o->system = "drift-sine";
  o->length = 0;
  o->noise_scale = -1.0;
  o->tau0 = 0;
  o->t = 0;
  o->delta = 0.05;
  o->n_train = 700;
  o->n_val = 200;
  o->n_test = 100;
  o->seed = 1;
  o->use_ar = 1;
  o->ar_order = 3;
  o->norm = STLCP_NORM_L2;
  o->histogram_bins = 20;
}

stlcp_status stlcp_evaluate(const stlcp_formula* f, const stlcp_eval_options* o, stlcp_report** out) {
  return guarded([&] {
    require(f, o, out, o->system);
    stlcp::EvalConfig cfg;
    cfg.method = to_method(o->method);
    cfg.system = stlcp::SyntheticSystem::preset(stlcp::parse_system(o->system));
    if (o->length > 0) cfg.system.length = o->length;
    if (o->noise_scale >= 0.0) cfg.system.noise_scale = o->noise_scale;
    cfg.formula = f->f;
    cfg.tau0 = o->tau0;
    cfg.t = o->t;
    cfg.delta = o->delta;
    cfg.n_train = o->n_train;
    cfg.n_val = o->n_val;
    cfg.n_test = o->n_test;
    cfg.seed = o->seed;
    cfg.predictor = o->use_ar ? stlcp::PredictorKind::Autoregressive : stlcp::PredictorKind::HoldLast;
    cfg.ar_order = o->ar_order;
    cfg.norm = to_norm(o->norm);
    cfg.histogram_bins = o->histogram_bins;
    *out = new stlcp_report{stlcp::evaluate(cfg)};
  });
}

void stlcp_report_free(stlcp_report* r) { delete r; }

stlcp_status stlcp_report_summary(const stlcp_report* r, char** out) {
  return guarded([&] {
    require(r, out);
    *out = copy_string(stlcp::report_summary(r->r));
  });
}

stlcp_status stlcp_report_outcomes_csv(const stlcp_report* r, char** out) {
  return guarded([&] {
    require(r, out);
    *out = copy_string(stlcp::outcomes_csv(r->r));
  });
}

stlcp_status stlcp_report_histogram_csv(const stlcp_report* r, char** out) {
  return guarded([&] {
    require(r, out);
    *out = copy_string(stlcp::histogram_csv(r->r.histogram));
  });
}

stlcp_status stlcp_report_calibration(const stlcp_report* r, stlcp_calibration** out) {
  return guarded([&] {
    require(r, out);
    *out = new stlcp_calibration{r->r.calibration};
  });
}

stlcp_status stlcp_report_counts(const stlcp_report* r, size_t counts[4], size_t* covered) {
  return guarded([&] {
    require(r, counts, covered);
    counts[0] = r->r.guaranteed_satisfied;
    counts[1] = r->r.guaranteed_violated;
    counts[2] = r->r.unguaranteed_satisfied;
    counts[3] = r->r.unguaranteed_violated;
    *covered = r->r.covered;
  });
}

stlcp_status stlcp_text_hash(const char* text, char** out) {
  return guarded([&] {
    require(text, out);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char* c = text; *c; ++c) {
      h ^= static_cast<unsigned char>(*c);
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    *out = copy_string(buf);
  });
}

}  // extern "C"
