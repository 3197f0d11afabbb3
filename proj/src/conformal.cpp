#include "stlcp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stlcp/error.hpp"

namespace stlcp {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "failure probability delta must lie in (0, 1), got " + format_double(delta));
  }
}

}  // namespace

ScoreSet::ScoreSet(std::vector<double> scores) : scores_(std::move(scores)) {
  for (double s : scores_) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::InvalidArgument, "nonconformity scores must be finite");
    }
  }
}

std::vector<double> ScoreSet::sorted() const {
  std::vector<double> out = scores_;
  std::sort(out.begin(), out.end());
  return out;
}

bool RegionConstant::finite() const noexcept { return std::isfinite(value); }

std::size_t conformal_rank(std::size_t k, double delta) {
  check_delta(delta);
  const double n = static_cast<double>(k) + 1.0;
  const double v = n - n * delta;
  // (k+1)(1-delta) that is an integer up to rounding must not round up
  const double nearest = std::round(v);
  if (std::fabs(v - nearest) <= 1e-9 * std::max(1.0, v)) {
    return static_cast<std::size_t>(std::max(nearest, 1.0));
  }
  return static_cast<std::size_t>(std::ceil(v));
}

RegionConstant quantile_region(const ScoreSet& scores, double delta) {
  RegionConstant r;
  r.count = scores.size();
  r.delta = delta;
  r.rank = conformal_rank(r.count, delta);
  if (r.rank > r.count) {
    r.value = std::numeric_limits<double>::infinity();
    return r;
  }
  std::vector<double> s(scores.scores().begin(), scores.scores().end());
  auto nth = s.begin() + static_cast<std::ptrdiff_t>(r.rank - 1);
  std::nth_element(s.begin(), nth, s.end());
  r.value = *nth;
  return r;
}

double direct_score(double rho_hat, double rho_true) {
  if (!std::isfinite(rho_hat) || !std::isfinite(rho_true)) {
    throw Error(ErrorCode::InvalidArgument,
                "robustness is infinite; direct calibration needs finite robustness values");
  }
  return rho_hat - rho_true;
}

std::vector<double> state_scores(const Signal& x, const Signal& predicted, Step t, Step horizon,
                                 Norm norm) {
  if (t < 0 || horizon < 0) throw Error(ErrorCode::InvalidArgument, "t and H must be >= 0");
  if (static_cast<Step>(x.length()) < t + horizon + 1) {
    throw Error(ErrorCode::SignalTooShort, "trajectory shorter than t + H + 1");
  }
  if (static_cast<Step>(predicted.length()) < horizon) {
    throw Error(ErrorCode::SignalTooShort, "predictions do not cover the horizon");
  }
  if (horizon > 0 && predicted.dim() != x.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and trajectory dimensions differ");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  std::vector<double> diff(x.dim());
  for (Step i = 0; i < horizon; ++i) {
    auto truth = x.at(static_cast<std::size_t>(t + 1 + i));
    auto guess = predicted.at(static_cast<std::size_t>(i));
    for (std::size_t d = 0; d < diff.size(); ++d) diff[d] = truth[d] - guess[d];
    out.push_back(norm_of(diff, norm));
  }
  return out;
}

std::vector<RegionConstant> timewise_regions(std::span<const ScoreSet> per_step, double delta,
                                             Step horizon) {
  check_delta(delta);
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
  if (per_step.size() != static_cast<std::size_t>(horizon)) {
    throw Error(ErrorCode::InvalidArgument,
                "need one score set per prediction step: expected " + std::to_string(horizon) +
                    ", got " + std::to_string(per_step.size()));
  }
  const double delta_bar = delta / static_cast<double>(horizon);
  std::vector<RegionConstant> out;
  out.reserve(per_step.size());
  for (const auto& s : per_step) out.push_back(quantile_region(s, delta_bar));
  return out;
}

}  // namespace stlcp
