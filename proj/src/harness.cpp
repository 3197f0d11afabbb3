#include "stlcp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "stlcp/error.hpp"

namespace stlcp {

const char* system_name(SystemKind kind) noexcept {
  switch (kind) {
    case SystemKind::DriftSine: return "drift-sine";
    case SystemKind::SwitchingNoise: return "switching-noise";
    case SystemKind::FallingRecovery: return "falling-recovery";
  }
  return "?";
}

SystemKind parse_system(std::string_view name) {
  if (name == "drift-sine") return SystemKind::DriftSine;
  if (name == "switching-noise") return SystemKind::SwitchingNoise;
  if (name == "falling-recovery") return SystemKind::FallingRecovery;
  throw Error(ErrorCode::InvalidArgument, "unknown synthetic system '" + std::string(name) + "'");
}

SyntheticSystem SyntheticSystem::preset(SystemKind kind) {
  SyntheticSystem s;
  s.kind = kind;
  switch (kind) {
    case SystemKind::DriftSine:
      break;
    case SystemKind::SwitchingNoise:
      s.length = 60;
      s.noise_scale = 0.05;
      s.initial = {-0.2, 0.2};
      s.timing = {15.0, 30.0};
      s.magnitude = {0.03, 0.06};
      s.drift = 0.1;
      break;
    case SystemKind::FallingRecovery:
      s.length = 450;
      s.noise_scale = 2.0;
      s.initial = {1000.0, 1100.0};
      s.timing = {180.0, 260.0};
      s.magnitude = {150.0, 300.0};
      s.drift = 0.0;
      break;
  }
  return s;
}

Schema SyntheticSystem::schema() const {
  switch (kind) {
    case SystemKind::DriftSine: return Schema{{"x"}};
    case SystemKind::SwitchingNoise: return Schema{{"x", "y"}};
    case SystemKind::FallingRecovery: return Schema{{"h"}};
  }
  return {};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, Range r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

Signal generate_one(const SyntheticSystem& sys, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n = static_cast<std::size_t>(sys.length);
  const double noise = sys.noise_scale;
  std::vector<double> v;
  switch (sys.kind) {
    case SystemKind::DriftSine: {
      const double x0 = uniform(rng, sys.initial);
      const double phase = uniform(rng, sys.timing);
      const double amp = uniform(rng, sys.magnitude);
      double walk = 0.0;
      v.reserve(n);
      for (std::size_t s = 0; s < n; ++s) {
        if (s > 0) walk += gauss(rng);
        const double ds = static_cast<double>(s);
        v.push_back(x0 + sys.drift * ds + amp * std::sin(sys.frequency * ds + phase) + noise * walk);
      }
      return Signal(1, std::move(v));
    }
    case SystemKind::SwitchingNoise: {
      const double y0 = uniform(rng, sys.initial);
      const double switch_at = uniform(rng, sys.timing);
      const double slope = uniform(rng, sys.magnitude);
      const double mode =
          std::bernoulli_distribution(std::clamp(sys.mode_probability, 0.0, 1.0))(rng) ? 1.0 : -1.0;
      v.reserve(2 * n);
      for (std::size_t s = 0; s < n; ++s) {
        const double ds = static_cast<double>(s);
        const double ex = gauss(rng);
        const double ey = gauss(rng);
        v.push_back(sys.drift * ds + noise * ex);
        v.push_back(y0 + mode * slope * std::max(0.0, ds - switch_at) + noise * ey);
      }
      return Signal(2, std::move(v));
    }
    case SystemKind::FallingRecovery: {
      const double h0 = uniform(rng, sys.initial);
      const double dip = std::max(uniform(rng, sys.timing), 1.0);
      const double depth = uniform(rng, sys.magnitude);
      double walk = 0.0;
      v.reserve(n);
      for (std::size_t s = 0; s < n; ++s) {
        if (s > 0) walk += gauss(rng);
        const double r = static_cast<double>(s) / dip;
        v.push_back(h0 - depth * r * std::exp(1.0 - r) + noise * walk);
      }
      return Signal(1, std::move(v));
    }
  }
  throw Error(ErrorCode::Internal, "unhandled system kind");
}

}  // namespace

std::vector<Trajectory> generate(const SyntheticSystem& system, std::size_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trajectory");
  if (system.length < 1) throw Error(ErrorCode::InvalidArgument, "trajectory length must be >= 1");
  if (!(system.noise_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise scale must be >= 0");
  for (const Range& r : {system.initial, system.timing, system.magnitude}) {
    if (!(r.lo <= r.hi)) throw Error(ErrorCode::InvalidArgument, "parameter range has lo > hi");
  }
  std::vector<Trajectory> out;
  out.reserve(count);
  const std::uint64_t base = splitmix64(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(i))));
    out.push_back(Trajectory{std::to_string(i), generate_one(system, rng)});
  }
  return out;
}

Histogram histogram_export(const std::vector<double>& scores, double marker, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  Histogram h;
  h.marker = marker;
  h.counts.assign(bins, 0);
  if (scores.empty()) {
    h.edges.assign(bins + 1, 0.0);
    return h;
  }
  double lo = *std::min_element(scores.begin(), scores.end());
  double hi = *std::max_element(scores.begin(), scores.end());
  if (std::isfinite(marker)) {
    lo = std::min(lo, marker);
    hi = std::max(hi, marker);
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + width * static_cast<double>(i));
  h.edges.back() = hi;
  for (double s : scores) {
    auto idx = static_cast<std::size_t>((s - lo) / width);
    h.counts[std::min(idx, bins - 1)] += 1;
  }
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "# region_constant=" << format_double(h.marker) << "\n";
  out << "bin_lo,bin_hi,count,contains_region_constant\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.edges[i];
    const double hi = h.edges[i + 1];
    const bool last = i + 1 == h.counts.size();
    const bool has_marker = h.marker >= lo && (h.marker < hi || (last && h.marker <= hi));
    out << format_double(lo) << ',' << format_double(hi) << ',' << h.counts[i] << ','
        << (has_marker ? 1 : 0) << "\n";
  }
  return out.str();
}

EvalReport evaluate(const EvalConfig& cfg) {
  const MonitorSetup setup{cfg.formula, cfg.system.schema(), cfg.tau0, cfg.t};
  const HorizonSpec h = setup.timing();
  if (cfg.system.length < std::max(h.tau0 + h.length, h.t) + 1) {
    throw Error(ErrorCode::SignalTooShort, "synthetic trajectories are too short for the formula");
  }
  const std::size_t total = cfg.n_train + cfg.n_val + cfg.n_test;
  if (total == 0 || cfg.n_test == 0) {
    throw Error(ErrorCode::InvalidArgument, "evaluation needs a non-empty test split");
  }
  DatasetSplit split = split_dataset(generate(cfg.system, total, cfg.seed), cfg.n_train, cfg.n_val,
                                     cfg.n_test);

  Predictor predictor = Predictor::hold_last();
  if (cfg.predictor == PredictorKind::Autoregressive && h.needs_prediction()) {
    predictor = fit_ar(split.train, cfg.ar_order, h.t, h.horizon);
  } else if (cfg.predictor == PredictorKind::External) {
    throw Error(ErrorCode::InvalidArgument, "evaluation generates its own data; use hold-last or ar");
  }

  const BoundFormula bound(cfg.formula, setup.schema);
  MonitorSetup verify_setup = setup;
  EvalReport report;
  report.method = cfg.method;
  if (cfg.method == Method::Direct) {
    report.calibration = calibrate_direct(predictor, split.val, setup, cfg.delta);
  } else {
    verify_setup.formula = to_pnf(cfg.formula);
    report.calibration =
        calibrate_indirect(predictor, split.val, h.t, std::max<Step>(h.horizon, 1), cfg.delta, cfg.norm);
  }
  for (const auto& r : report.calibration.regions) {
    if (!r.finite()) report.infinite_region = true;
  }

  for (const auto& x : split.test) {
    TestOutcome o;
    o.id = x.id;
    const Trajectory prefix = observed_prefix(x, h.t);
    Signal xhat = prefix.states;
    Signal predicted;
    if (h.needs_prediction()) {
      predicted = predictor.predict(prefix, h.horizon);
      xhat = concat_prediction(prefix.states, predicted);
    }
    o.predicted_robustness = eval_robust(bound, xhat, h.tau0);
    o.true_robustness = eval_robust(bound, x.states, h.tau0);
    o.satisfied = eval_bool(bound, x.states, h.tau0);
    const Verdict v = cfg.method == Method::Direct
                          ? verify_direct(x, predictor, verify_setup, report.calibration)
                          : verify_indirect(x, predictor, verify_setup, report.calibration);
    o.robustness = v.robustness;
    o.guaranteed = v.guaranteed;
    if (!h.needs_prediction()) {
      o.covered = true;
    } else if (cfg.method == Method::Direct) {
      o.covered = o.predicted_robustness - o.true_robustness <= report.calibration.regions.front().value;
    } else {
      const auto errs = state_scores(x.states, predicted, h.t, h.horizon, cfg.norm);
      o.covered = true;
      for (std::size_t i = 0; i < errs.size(); ++i) {
        if (!(errs[i] <= report.calibration.regions[i].value)) o.covered = false;
      }
    }
    report.covered += o.covered ? 1 : 0;
    if (o.guaranteed) {
      (o.satisfied ? report.guaranteed_satisfied : report.guaranteed_violated) += 1;
    } else {
      (o.satisfied ? report.unguaranteed_satisfied : report.unguaranteed_violated) += 1;
    }
    report.outcomes.push_back(std::move(o));
  }
  report.test_size = report.outcomes.size();

  // Direct: robustness errors. Indirect: state errors at the last predicted step.
  if (cfg.method == Method::Direct) {
    report.histogram = histogram_export(report.calibration.scores,
                                        report.calibration.regions.front().value, cfg.histogram_bins);
  } else {
    const Step last = std::max<Step>(report.calibration.horizon, 1);
    const auto per_step = indirect_scores(predictor, split.val, h.t, last, cfg.norm);
    report.histogram = histogram_export(per_step.back(), report.calibration.regions.back().value,
                                        cfg.histogram_bins);
  }
  return report;
}

std::string report_summary(const EvalReport& r) {
  std::ostringstream out;
  out << "method=" << method_name(r.method) << "\n"
      << "delta=" << format_double(r.calibration.delta) << "\n"
      << "k=" << r.calibration.k << "\n"
      << "p=" << r.calibration.rank() << "\n"
      << "horizon=" << r.calibration.horizon << "\n";
  if (r.method == Method::Direct) {
    out << "C=" << format_double(r.calibration.regions.front().value) << "\n";
  } else {
    double widest = 0.0;
    for (const auto& c : r.calibration.regions) widest = std::max(widest, c.value);
    out << "C_tau_max=" << format_double(widest) << "\n";
  }
  out << "infinite_region=" << (r.infinite_region ? "true" : "false") << "\n"
      << "test_size=" << r.test_size << "\n"
      << "guaranteed_satisfied=" << r.guaranteed_satisfied << "\n"
      << "guaranteed_violated=" << r.guaranteed_violated << "\n"
      << "unguaranteed_satisfied=" << r.unguaranteed_satisfied << "\n"
      << "unguaranteed_violated=" << r.unguaranteed_violated << "\n"
      << "covered=" << r.covered << "\n"
      << "coverage=" << format_double(r.coverage()) << "\n";
  return out.str();
}

std::string outcomes_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "traj_id,robustness,predicted_robustness,true_robustness,guaranteed,satisfied,covered\n";
  for (const auto& o : r.outcomes) {
    out << o.id << ',' << format_double(o.robustness) << ',' << format_double(o.predicted_robustness)
        << ',' << format_double(o.true_robustness) << ',' << int(o.guaranteed) << ','
        << int(o.satisfied) << ',' << int(o.covered) << "\n";
  }
  return out.str();
}

}  // namespace stlcp
