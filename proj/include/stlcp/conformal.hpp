#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stlcp/formula.hpp"
#include "stlcp/semantics.hpp"

namespace stlcp {

/// Calibration nonconformity scores. Entries are finite; the +inf sentinel
/// at rank k+1 is implicit.
class ScoreSet {
 public:
  ScoreSet() = default;
  explicit ScoreSet(std::vector<double> scores);

  std::size_t size() const noexcept { return scores_.size(); }
  std::span<const double> scores() const noexcept { return scores_; }
  /// Ascending copy; duplicates are kept.
  std::vector<double> sorted() const;

 private:
  std::vector<double> scores_;
};

/// Prediction region constant C with its rank metadata.
struct RegionConstant {
  double value = 0.0;  // +inf when rank > count
  std::size_t rank = 0;   // p
  std::size_t count = 0;  // k
  double delta = 0.0;

  bool finite() const noexcept;
};

/// p = ceil((k + 1)(1 - delta)).
std::size_t conformal_rank(std::size_t k, double delta);

/// C = p-th smallest score, or +inf when p > k.
RegionConstant quantile_region(const ScoreSet& scores, double delta);

/// R = rho_hat - rho_true; positive when the prediction is too optimistic.
double direct_score(double rho_hat, double rho_true);

/// R_tau = ||x_tau - xhat_tau|| for tau = t+1..t+H. `predicted[i]` is the
/// prediction for step t+1+i.
std::vector<double> state_scores(const Signal& x, const Signal& predicted, Step t, Step horizon,
                                 Norm norm);

/// One region per prediction step, each at delta/H.
std::vector<RegionConstant> timewise_regions(std::span<const ScoreSet> per_step, double delta,
                                             Step horizon);

}  // namespace stlcp
