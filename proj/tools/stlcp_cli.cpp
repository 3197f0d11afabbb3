// stlcp command-line front end. Uses only the C API.

#include <CLI11.hpp>

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stlcp/stlcp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotCertified = 2;

struct Failure {
  std::string message;
};

void check(stlcp_status s) {
  if (s != STLCP_OK) {
    throw Failure{std::string(stlcp_status_name(s)) + ": " + stlcp_last_error()};
  }
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using FormulaPtr = std::unique_ptr<stlcp_formula, Deleter<stlcp_formula, stlcp_formula_free>>;
using DatasetPtr = std::unique_ptr<stlcp_dataset, Deleter<stlcp_dataset, stlcp_dataset_free>>;
using PredictorPtr =
    std::unique_ptr<stlcp_predictor, Deleter<stlcp_predictor, stlcp_predictor_free>>;
using CalibrationPtr =
    std::unique_ptr<stlcp_calibration, Deleter<stlcp_calibration, stlcp_calibration_free>>;
using VerdictPtr = std::unique_ptr<stlcp_verdict, Deleter<stlcp_verdict, stlcp_verdict_free>>;
using ReportPtr = std::unique_ptr<stlcp_report, Deleter<stlcp_report, stlcp_report_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  stlcp_string_free(s);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{"cannot open '" + path.string() + "' for writing"};
  out << text;
  if (!out) throw Failure{"write failed for '" + path.string() + "'"};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{"cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FlatConfig : CLI::ConfigINI {
  std::string subcommand;

  // Values are scalars: formulas hold spaces and commas, lists split on the option.
  FlatConfig() {
    arrayStart = '\x01';
    arrayEnd = '\x01';
    arraySeparator = '\x01';
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() && !subcommand.empty()) item.parents = {subcommand};
    }
    return items;
  }
};

struct Options {
  std::string formula;
  std::string formula_file;
  int64_t truncate = -1;
  std::string tau0 = "zero";
  int64_t t = 0;
  double delta = 0.05;
  std::string method = "direct";
  std::string norm = "l2";
  std::string predictor = "hold-last";
  std::string kind = "ar";
  std::size_t order = 3;
  std::string train, val, data, id, out, calibration;
  std::string system = "drift-sine";
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::size_t n_train = 700, n_val = 200, n_test = 100;
  int64_t length = 0;
  double noise_scale = -1.0;
  std::size_t bins = 20;
  std::vector<double> grid;
};

FormulaPtr load_formula(const Options& o) {
  std::string text = o.formula;
  if (!o.formula_file.empty()) {
    if (!text.empty()) throw Failure{"give either --formula or --formula-file, not both"};
    text = read_text(o.formula_file);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  }
  if (text.empty()) throw Failure{"a formula is required (--formula or --formula-file)"};
  stlcp_formula* f = nullptr;
  check(stlcp_formula_parse(text.c_str(), &f));
  FormulaPtr parsed(f);
  if (o.truncate >= 0) {
    stlcp_formula* g = nullptr;
    check(stlcp_formula_truncate(parsed.get(), o.truncate, &g));
    parsed.reset(g);
  }
  return parsed;
}

int64_t resolve_tau0(const Options& o) {
  if (o.tau0 == "zero") return 0;
  if (o.tau0 == "current") return o.t;
  int64_t v = 0;
  const char* end = o.tau0.data() + o.tau0.size();
  auto [ptr, ec] = std::from_chars(o.tau0.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0) {
    throw Failure{"--tau0 must be 'zero', 'current' or a non-negative step, got '" + o.tau0 + "'"};
  }
  return v;
}

int64_t horizon_of(const stlcp_formula* f, int64_t tau0, int64_t t) {
  int64_t length = 0, h = 0;
  check(stlcp_formula_length(f, &length));
  check(stlcp_horizon(tau0, t, length, &h));
  return h;
}

stlcp_method parse_method(const std::string& s) {
  if (s == "direct") return STLCP_METHOD_DIRECT;
  if (s == "indirect") return STLCP_METHOD_INDIRECT;
  throw Failure{"unknown method '" + s + "' (direct | indirect)"};
}

stlcp_norm parse_norm(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "l2") return STLCP_NORM_L2;
  if (s == "linf") return STLCP_NORM_LINF;
  throw Failure{"unknown norm '" + s + "' (l2 | linf)"};
}

DatasetPtr load_dataset(const std::string& path, const char* what) {
  if (path.empty()) throw Failure{std::string("missing ") + what};
  stlcp_dataset* d = nullptr;
  check(stlcp_dataset_load(path.c_str(), &d));
  return DatasetPtr(d);
}

PredictorPtr load_predictor(const std::string& spec) {
  stlcp_predictor* p = nullptr;
  if (spec == "hold-last") {
    check(stlcp_predictor_hold_last(&p));
  } else if (spec.rfind("external:", 0) == 0) {
    check(stlcp_predictor_load_external(spec.substr(9).c_str(), &p));
  } else {
    check(stlcp_predictor_load(spec.c_str(), &p));
  }
  return PredictorPtr(p);
}

std::size_t trajectory_index(const stlcp_dataset* d, const std::string& id) {
  if (id.empty()) return 0;
  std::size_t i = 0;
  check(stlcp_dataset_find(d, id.c_str(), &i));
  return i;
}

std::string config_hash(const CLI::App& app) {
  char* h = nullptr;
  check(stlcp_text_hash(app.config_to_str(true, false).c_str(), &h));
  return take(h);
}

int cmd_check(const Options& o) {
  auto f = load_formula(o);
  char* s = nullptr;
  check(stlcp_formula_render(f.get(), &s));
  const std::string rendered = take(s);
  int bounded = 0, pnf = 0;
  check(stlcp_formula_is_bounded(f.get(), &bounded));
  check(stlcp_formula_is_pnf(f.get(), &pnf));
  stlcp_formula* g = nullptr;
  check(stlcp_formula_to_pnf(f.get(), &g));
  FormulaPtr pnf_form(g);
  check(stlcp_formula_render(pnf_form.get(), &s));
  const std::string pnf_text = take(s);
  check(stlcp_formula_hash(f.get(), &s));
  const std::string hash = take(s);
  check(stlcp_formula_tree(f.get(), &s));
  const std::string tree = take(s);

  std::cout << "formula=" << rendered << "\n";
  std::cout << "bounded=" << (bounded ? "true" : "false") << "\n";
  if (bounded) {
    int64_t length = 0;
    check(stlcp_formula_length(f.get(), &length));
    std::cout << "length=" << length << "\n";
  } else {
    std::cout << "length=inf\n";
  }
  std::cout << "pnf=" << pnf_text << "\n";
  std::cout << "pnf_unchanged=" << (pnf ? "true" : "false") << "\n";
  std::cout << "formula_hash=" << hash << "\n";
  std::cout << "ast:\n" << tree;
  return kExitOk;
}

int cmd_generate(const Options& o) {
  if (o.out.empty()) throw Failure{"--out is required"};
  stlcp_dataset* d = nullptr;
  check(stlcp_dataset_generate(o.system.c_str(), o.count, o.seed, &d));
  DatasetPtr data(d);
  check(stlcp_dataset_save(data.get(), o.out.c_str()));
  std::cout << "wrote " << o.count << " trajectories to " << o.out << "\n";
  return kExitOk;
}

int cmd_fit(const Options& o) {
  if (o.out.empty()) throw Failure{"--out is required"};
  stlcp_predictor* p = nullptr;
  if (o.kind == "hold-last") {
    check(stlcp_predictor_hold_last(&p));
  } else if (o.kind == "ar") {
    auto f = load_formula(o);
    const int64_t tau0 = resolve_tau0(o);
    const int64_t h = std::max<int64_t>(horizon_of(f.get(), tau0, o.t), 1);
    auto train = load_dataset(o.train, "--train");
    check(stlcp_predictor_fit_ar(train.get(), o.order, o.t, h, &p));
  } else {
    throw Failure{"unknown predictor kind '" + o.kind + "' (ar | hold-last)"};
  }
  PredictorPtr pred(p);
  check(stlcp_predictor_save(pred.get(), o.out.c_str()));
  std::cout << "wrote predictor to " << o.out << "\n";
  return kExitOk;
}

int cmd_calibrate(const Options& o) {
  if (o.out.empty()) throw Failure{"--out is required"};
  auto f = load_formula(o);
  const int64_t tau0 = resolve_tau0(o);
  auto pred = load_predictor(o.predictor);
  auto val = load_dataset(o.val, "--val");
  stlcp_calibration* c = nullptr;
  if (parse_method(o.method) == STLCP_METHOD_DIRECT) {
    check(stlcp_calibrate_direct(pred.get(), val.get(), f.get(), tau0, o.t, o.delta, &c));
  } else {
    const int64_t h = std::max<int64_t>(horizon_of(f.get(), tau0, o.t), 1);
    check(stlcp_calibrate_indirect(pred.get(), val.get(), o.t, h, o.delta, parse_norm(o.norm), &c));
  }
  CalibrationPtr cal(c);
  check(stlcp_calibration_save(cal.get(), o.out.c_str()));
  char* text = nullptr;
  check(stlcp_calibration_text(cal.get(), &text));
  std::cout << take(text);
  return kExitOk;
}

int report_verdict(const stlcp_verdict* v, const std::string& hash, const std::string& out) {
  char* s = nullptr;
  check(stlcp_verdict_record(v, hash.c_str(), &s));
  const std::string record = take(s);
  std::cout << record << "\n";
  check(stlcp_verdict_diagnostics(v, &s));
  const std::string diag = take(s);
  if (!diag.empty()) std::cerr << "worst-case predicate values:\n" << diag;
  if (!out.empty()) write_text(out, record + "\n");
  int guaranteed = 0;
  check(stlcp_verdict_guaranteed(v, &guaranteed));
  return guaranteed ? kExitOk : kExitNotCertified;
}

int cmd_verify(const Options& o, const std::string& hash) {
  if (o.calibration.empty()) throw Failure{"--calibration is required"};
  auto f = load_formula(o);
  const int64_t tau0 = resolve_tau0(o);
  auto pred = load_predictor(o.predictor);
  auto data = load_dataset(o.data, "--data");
  stlcp_calibration* c = nullptr;
  check(stlcp_calibration_load(o.calibration.c_str(), &c));
  CalibrationPtr cal(c);
  stlcp_verdict* v = nullptr;
  check(stlcp_verify(pred.get(), f.get(), cal.get(), data.get(), trajectory_index(data.get(), o.id),
                     tau0, o.t, &v));
  VerdictPtr verdict(v);
  return report_verdict(verdict.get(), hash, o.out);
}

int cmd_min_delta(const Options& o, const std::string& hash) {
  if (o.grid.empty()) throw Failure{"--grid needs at least one value"};
  auto f = load_formula(o);
  const int64_t tau0 = resolve_tau0(o);
  auto pred = load_predictor(o.predictor);
  auto val = load_dataset(o.val, "--val");
  auto data = load_dataset(o.data, "--data");
  stlcp_verdict* v = nullptr;
  check(stlcp_min_delta(parse_method(o.method), pred.get(), val.get(), f.get(), data.get(),
                        trajectory_index(data.get(), o.id), tau0, o.t, o.grid.data(), o.grid.size(),
                        parse_norm(o.norm), &v));
  if (!v) {
    std::cout << "certified=false grid_size=" << o.grid.size() << "\n";
    return kExitNotCertified;
  }
  VerdictPtr verdict(v);
  return report_verdict(verdict.get(), hash, o.out);
}

int cmd_evaluate(const Options& o) {
  auto f = load_formula(o);
  stlcp_eval_options opt;
  stlcp_eval_options_default(&opt);
  opt.method = parse_method(o.method);
  opt.system = o.system.c_str();
  opt.length = o.length;
  opt.noise_scale = o.noise_scale;
  opt.t = o.t;
  opt.tau0 = resolve_tau0(o);
  opt.delta = o.delta;
  opt.n_train = o.n_train;
  opt.n_val = o.n_val;
  opt.n_test = o.n_test;
  opt.seed = o.seed;
  if (o.kind != "ar" && o.kind != "hold-last") {
    throw Failure{"unknown predictor kind '" + o.kind + "' (ar | hold-last)"};
  }
  opt.use_ar = o.kind == "ar" ? 1 : 0;
  opt.ar_order = o.order;
  opt.norm = parse_norm(o.norm);
  opt.histogram_bins = o.bins;
  stlcp_report* r = nullptr;
  check(stlcp_evaluate(f.get(), &opt, &r));
  ReportPtr report(r);

  char* s = nullptr;
  check(stlcp_report_summary(report.get(), &s));
  const std::string summary = take(s);
  std::cout << summary;
  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    write_text(dir / "summary.txt", summary);
    check(stlcp_report_outcomes_csv(report.get(), &s));
    write_text(dir / "outcomes.csv", take(s));
    check(stlcp_report_histogram_csv(report.get(), &s));
    write_text(dir / "histogram.csv", take(s));
    stlcp_calibration* c = nullptr;
    check(stlcp_report_calibration(report.get(), &c));
    CalibrationPtr cal(c);
    check(stlcp_calibration_save(cal.get(), (dir / "calibration.txt").string().c_str()));
  }
  return kExitOk;
}

void add_formula(CLI::App* cmd, Options& o) {
  cmd->add_option("--formula", o.formula, "STL formula text");
  cmd->add_option("--formula-file", o.formula_file, "file holding the formula");
  cmd->add_option("--truncate", o.truncate, "replace unbounded upper bounds with this step");
}

void add_timing(CLI::App* cmd, Options& o) {
  cmd->add_option("--tau0", o.tau0, "evaluation time: zero | current | <step>")->capture_default_str();
  cmd->add_option("--t", o.t, "current time (last observed step)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive runtime verification of STL with conformal prediction"};
  app.set_config("--config", "", "flat key=value configuration file; flags override it");
  app.fallthrough();
  app.require_subcommand(1);
  Options o;

  auto* check_cmd = app.add_subcommand("check", "parse a formula and print its summary");
  check_cmd->add_option("formula", o.formula, "STL formula text");
  check_cmd->add_option("--formula-file", o.formula_file, "file holding the formula");
  check_cmd->add_option("--truncate", o.truncate, "replace unbounded upper bounds with this step");

  auto* gen = app.add_subcommand("generate", "sample trajectories from a synthetic system");
  gen->add_option("--system", o.system, "drift-sine | switching-noise | falling-recovery")
      ->capture_default_str();
  gen->add_option("--count", o.count)->capture_default_str();
  gen->add_option("--seed", o.seed)->capture_default_str();
  gen->add_option("--out", o.out, "trajectory file (.csv or .jsonl)");

  auto* fit = app.add_subcommand("fit", "fit a predictor and store it");
  add_formula(fit, o);
  add_timing(fit, o);
  fit->add_option("--kind", o.kind, "ar | hold-last")->capture_default_str();
  fit->add_option("--order", o.order, "AR order")->capture_default_str();
  fit->add_option("--train", o.train, "training trajectories");
  fit->add_option("--out", o.out, "predictor artifact path");

  auto* cal = app.add_subcommand("calibrate", "compute a calibration artifact");
  add_formula(cal, o);
  add_timing(cal, o);
  cal->add_option("--method", o.method, "direct | indirect")->capture_default_str();
  cal->add_option("--delta", o.delta)->capture_default_str();
  cal->add_option("--norm", o.norm, "l2 | linf")->capture_default_str();
  cal->add_option("--predictor", o.predictor, "artifact path | hold-last | external:<table.csv>")
      ->capture_default_str();
  cal->add_option("--val", o.val, "validation trajectories");
  cal->add_option("--out", o.out, "calibration artifact path");

  auto* ver = app.add_subcommand("verify", "issue a verdict for one observed trajectory");
  add_formula(ver, o);
  add_timing(ver, o);
  ver->add_option("--predictor", o.predictor, "artifact path | hold-last | external:<table.csv>")
      ->capture_default_str();
  ver->add_option("--calibration", o.calibration, "calibration artifact");
  ver->add_option("--data", o.data, "trajectory file holding the observation");
  ver->add_option("--id", o.id, "trajectory id (default: first)");
  ver->add_option("--out", o.out, "also write the verdict record here");

  auto* md = app.add_subcommand("min-delta", "smallest delta on a grid that certifies");
  add_formula(md, o);
  add_timing(md, o);
  md->add_option("--method", o.method, "direct | indirect")->capture_default_str();
  md->add_option("--norm", o.norm, "l2 | linf")->capture_default_str();
  md->add_option("--predictor", o.predictor, "artifact path | hold-last | external:<table.csv>")
      ->capture_default_str();
  md->add_option("--val", o.val, "validation trajectories");
  md->add_option("--data", o.data, "trajectory file holding the observation");
  md->add_option("--id", o.id, "trajectory id (default: first)");
  md->add_option("--grid", o.grid, "ascending delta values")->delimiter(',');
  md->add_option("--out", o.out, "also write the verdict record here");

  auto* ev = app.add_subcommand("evaluate", "run the full pipeline on a synthetic system");
  add_formula(ev, o);
  add_timing(ev, o);
  ev->add_option("--method", o.method, "direct | indirect")->capture_default_str();
  ev->add_option("--system", o.system)->capture_default_str();
  ev->add_option("--length", o.length, "trajectory length (0 = system default)");
  ev->add_option("--noise-scale", o.noise_scale, "noise scale (negative = system default)");
  ev->add_option("--delta", o.delta)->capture_default_str();
  ev->add_option("--n-train", o.n_train)->capture_default_str();
  ev->add_option("--n-val", o.n_val)->capture_default_str();
  ev->add_option("--n-test", o.n_test)->capture_default_str();
  ev->add_option("--seed", o.seed)->capture_default_str();
  ev->add_option("--kind", o.kind, "ar | hold-last")->capture_default_str();
  ev->add_option("--order", o.order)->capture_default_str();
  ev->add_option("--norm", o.norm, "l2 | linf")->capture_default_str();
  ev->add_option("--bins", o.bins)->capture_default_str();
  ev->add_option("--out", o.out, "output directory for tables");

  // Flat config keys belong to whichever subcommand is being run.
  auto config = std::make_shared<FlatConfig>();
  for (int i = 1; i < argc && config->subcommand.empty(); ++i) {
    if (app.get_subcommand_no_throw(argv[i])) config->subcommand = argv[i];
  }
  app.config_formatter(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    const std::string hash = config_hash(app);
    if (*check_cmd) return cmd_check(o);
    if (*gen) return cmd_generate(o);
    if (*fit) return cmd_fit(o);
    if (*cal) return cmd_calibrate(o);
    if (*ver) return cmd_verify(o, hash);
    if (*md) return cmd_min_delta(o, hash);
    if (*ev) return cmd_evaluate(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
