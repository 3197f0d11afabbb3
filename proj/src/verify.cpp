#include "stlcp/verify.hpp"

#include <algorithm>
#include <cmath>

#include "stlcp/error.hpp"

namespace stlcp {

const char* method_name(Method method) noexcept {
  return method == Method::Direct ? "direct" : "indirect";
}

Method parse_method(std::string_view name) {
  if (name == "direct") return Method::Direct;
  if (name == "indirect") return Method::Indirect;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

HorizonSpec MonitorSetup::timing() const { return horizon(tau0, t, formula_length(formula)); }

namespace {

// Observed prefix of x concatenated with predictions, long enough for the
// formula at tau0 (per the predicted-trajectory construction).
Signal predicted_trajectory(const Trajectory& x, const Predictor& predictor, const HorizonSpec& h) {
  Trajectory prefix = observed_prefix(x, h.t);
  if (!h.needs_prediction()) return prefix.states;
  return concat_prediction(prefix.states, predictor.predict(prefix, h.horizon));
}

void require_length(const Trajectory& x, Step needed) {
  if (static_cast<Step>(x.states.length()) < needed) {
    throw Error(ErrorCode::SignalTooShort, "trajectory '" + x.id + "' has " +
                                               std::to_string(x.states.length()) +
                                               " states, calibration needs " +
                                               std::to_string(needed));
  }
}

Verdict observation_verdict(Method method, const Trajectory& observed, const MonitorSetup& setup,
                            const HorizonSpec& h, const BoundFormula& bound) {
  Trajectory prefix = observed_prefix(observed, h.t);
  Verdict v;
  v.method = method;
  v.robustness = eval_robust(bound, prefix.states, h.tau0);
  v.guaranteed = v.robustness > 0.0;
  v.delta = 0.0;
  v.t = h.t;
  v.tau0 = h.tau0;
  v.horizon = h.horizon;
  v.formula_hash = formula_hash(setup.formula);
  v.decided_by_observation = true;
  return v;
}

void check_binding(const Calibration& c, Method method, const MonitorSetup& setup,
                   const HorizonSpec& h) {
  auto mismatch = [](const std::string& what) {
    throw Error(ErrorCode::CalibrationMismatch, "calibration does not match: " + what);
  };
  if (c.method != method) mismatch(std::string("calibrated for the ") + method_name(c.method) + " method");
  if (c.t != h.t) mismatch("calibrated for t=" + std::to_string(c.t) + ", monitoring at t=" + std::to_string(h.t));
  if (method == Method::Direct) {
    if (c.formula_hash != formula_hash(setup.formula)) mismatch("formula hash differs");
    if (c.tau0 != h.tau0) mismatch("calibrated for tau0=" + std::to_string(c.tau0));
    if (c.horizon != h.horizon) mismatch("calibrated for H=" + std::to_string(c.horizon));
    if (c.regions.size() != 1) mismatch("direct calibration must hold exactly one region");
  } else {
    if (!c.formula_hash.empty() && c.formula_hash != formula_hash(setup.formula)) {
      mismatch("formula hash differs");
    }
    if (h.horizon > 0 && static_cast<Step>(c.regions.size()) < h.horizon) {
      throw Error(ErrorCode::HorizonExceeded,
                  "indirect calibration covers " + std::to_string(c.regions.size()) +
                      " steps, formula needs H=" + std::to_string(h.horizon));
    }
  }
}

}  // namespace

std::vector<double> direct_scores(const Predictor& predictor, std::span<const Trajectory> val,
                                  const MonitorSetup& setup) {
  const HorizonSpec h = setup.timing();
  const BoundFormula bound(setup.formula, setup.schema);
  predictor.require_coverage(val, h.t, std::max<Step>(h.horizon, 0));
  std::vector<double> scores;
  scores.reserve(val.size());
  for (const auto& x : val) {
    require_length(x, std::max(h.tau0 + h.length + 1, h.t + 1));
    const Signal xhat = predicted_trajectory(x, predictor, h);
    scores.push_back(direct_score(eval_robust(bound, xhat, h.tau0), eval_robust(bound, x.states, h.tau0)));
  }
  return scores;
}

Calibration calibrate_direct(const Predictor& predictor, std::span<const Trajectory> val,
                             const MonitorSetup& setup, double delta) {
  const HorizonSpec h = setup.timing();
  Calibration c;
  c.method = Method::Direct;
  c.delta = delta;
  c.k = val.size();
  c.tau0 = h.tau0;
  c.t = h.t;
  c.horizon = h.horizon;
  c.formula_hash = formula_hash(setup.formula);
  c.scores = direct_scores(predictor, val, setup);
  c.regions = {quantile_region(ScoreSet(c.scores), delta)};
  return c;
}

Verdict verify_direct(const Trajectory& observed, const Predictor& predictor,
                      const MonitorSetup& setup, const Calibration& calibration) {
  const HorizonSpec h = setup.timing();
  const BoundFormula bound(setup.formula, setup.schema);
  if (!h.needs_prediction()) return observation_verdict(Method::Direct, observed, setup, h, bound);
  check_binding(calibration, Method::Direct, setup, h);
  Verdict v;
  v.method = Method::Direct;
  v.robustness = eval_robust(bound, predicted_trajectory(observed, predictor, h), h.tau0);
  v.regions = calibration.regions;
  v.guaranteed = v.robustness > calibration.regions.front().value;
  v.delta = calibration.delta;
  v.t = h.t;
  v.tau0 = h.tau0;
  v.horizon = h.horizon;
  v.formula_hash = calibration.formula_hash;
  return v;
}

std::vector<std::vector<double>> indirect_scores(const Predictor& predictor,
                                                 std::span<const Trajectory> val, Step t,
                                                 Step horizon, Norm norm) {
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "indirect calibration needs H >= 1");
  predictor.require_coverage(val, t, horizon);
  std::vector<std::vector<double>> per_step(static_cast<std::size_t>(horizon));
  for (auto& s : per_step) s.reserve(val.size());
  for (const auto& x : val) {
    require_length(x, t + horizon + 1);
    const Trajectory prefix = observed_prefix(x, t);
    const auto r = state_scores(x.states, predictor.predict(prefix, horizon), t, horizon, norm);
    for (std::size_t i = 0; i < r.size(); ++i) per_step[i].push_back(r[i]);
  }
  return per_step;
}

Calibration calibrate_indirect(const Predictor& predictor, std::span<const Trajectory> val, Step t,
                               Step horizon, double delta, Norm norm) {
  const auto per_step = indirect_scores(predictor, val, t, horizon, norm);
  std::vector<ScoreSet> sets;
  sets.reserve(per_step.size());
  for (const auto& s : per_step) sets.emplace_back(s);
  Calibration c;
  c.method = Method::Indirect;
  c.delta = delta;
  c.k = val.size();
  c.tau0 = 0;
  c.t = t;
  c.horizon = horizon;
  c.norm = norm;
  c.regions = timewise_regions(sets, delta, horizon);
  return c;
}

Verdict verify_indirect(const Trajectory& observed, const Predictor& predictor,
                        const MonitorSetup& setup, const Calibration& calibration) {
  if (!is_pnf(setup.formula)) {
    throw Error(ErrorCode::NotPnf, "indirect verification needs a formula in positive normal form");
  }
  const HorizonSpec h = setup.timing();
  const BoundFormula bound(setup.formula, setup.schema);
  if (!h.needs_prediction()) return observation_verdict(Method::Indirect, observed, setup, h, bound);
  check_binding(calibration, Method::Indirect, setup, h);

  BallFamily balls;
  balls.center = predicted_trajectory(observed, predictor, h);
  balls.t = h.t;
  balls.norm = calibration.norm;
  for (Step i = 0; i < h.horizon; ++i) {
    balls.radii.push_back(calibration.regions[static_cast<std::size_t>(i)].value);
  }
  Verdict v;
  v.method = Method::Indirect;
  v.robustness = eval_worst_case(bound, balls, h.tau0);
  v.regions.assign(calibration.regions.begin(),
                   calibration.regions.begin() + static_cast<std::ptrdiff_t>(h.horizon));
  v.guaranteed = v.robustness > 0.0;
  v.delta = calibration.delta;
  v.t = h.t;
  v.tau0 = h.tau0;
  v.horizon = h.horizon;
  v.formula_hash = formula_hash(setup.formula);
  v.diagnostics = worst_case_diagnostics(bound, balls, h.tau0);
  return v;
}

std::optional<DeltaSearchResult> min_delta_search(Method method, const Predictor& predictor,
                                                  std::span<const Trajectory> val,
                                                  const Trajectory& observed,
                                                  const MonitorSetup& setup,
                                                  std::span<const double> grid, Norm norm) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "delta grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "delta grid values must lie in (0, 1)");
    }
    if (i && !(grid[i - 1] < grid[i])) {
      throw Error(ErrorCode::InvalidArgument, "delta grid must be strictly ascending");
    }
  }
  const HorizonSpec h = setup.timing();
  if (!h.needs_prediction()) {
    Calibration none;
    Verdict v = method == Method::Direct ? verify_direct(observed, predictor, setup, none)
                                         : verify_indirect(observed, predictor, setup, none);
    if (v.guaranteed) return DeltaSearchResult{grid.front(), v};
    return std::nullopt;
  }

  // Scores do not depend on delta; only the quantile does.
  if (method == Method::Direct) {
    Calibration c;
    c.method = Method::Direct;
    c.k = val.size();
    c.tau0 = h.tau0;
    c.t = h.t;
    c.horizon = h.horizon;
    c.formula_hash = formula_hash(setup.formula);
    c.scores = direct_scores(predictor, val, setup);
    const ScoreSet scores(c.scores);
    for (double delta : grid) {
      c.delta = delta;
      c.regions = {quantile_region(scores, delta)};
      Verdict v = verify_direct(observed, predictor, setup, c);
      if (v.guaranteed) return DeltaSearchResult{delta, std::move(v)};
    }
    return std::nullopt;
  }
  const auto per_step = indirect_scores(predictor, val, h.t, h.horizon, norm);
  std::vector<ScoreSet> sets(per_step.begin(), per_step.end());
  Calibration c;
  c.method = Method::Indirect;
  c.k = val.size();
  c.t = h.t;
  c.horizon = h.horizon;
  c.norm = norm;
  for (double delta : grid) {
    c.delta = delta;
    c.regions = timewise_regions(sets, delta, h.horizon);
    Verdict v = verify_indirect(observed, predictor, setup, c);
    if (v.guaranteed) return DeltaSearchResult{delta, std::move(v)};
  }
  return std::nullopt;
}

}  // namespace stlcp
