#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stlcp/formula.hpp"
#include "stlcp/semantics.hpp"

namespace stlcp {

struct Trajectory {
  std::string id;
  Signal states;
};

/// First t+1 states of `x` (observations up to and including step t).
Trajectory observed_prefix(const Trajectory& x, Step t);

/// Observed prefix followed by the predicted states.
Signal concat_prediction(const Signal& prefix, const Signal& predicted);

struct DatasetSplit {
  std::vector<Trajectory> train;
  std::vector<Trajectory> val;
  std::vector<Trajectory> test;
};

/// Consecutive blocks in input order. Ids must be unique.
DatasetSplit split_dataset(std::vector<Trajectory> data, std::size_t n_train, std::size_t n_val,
                           std::size_t n_test);
/// Block sizes from fractions (defaults 70/20/10); the test block takes the remainder.
DatasetSplit split_dataset(std::vector<Trajectory> data, double train_fraction = 0.7,
                           double val_fraction = 0.2);

/// One-step linear model x_{s+1} = W [x_s; x_{s-1}; ...; x_{s-m+1}; 1],
/// rolled out for multi-step prediction.
struct ArModel {
  std::size_t order = 1;
  std::size_t dim = 1;
  Step t = 0;            // current time the model was fitted for
  Step max_horizon = 0;  // H used at fit time
  std::vector<double> weights;  // dim x (order*dim + 1), row-major

  std::size_t cols() const noexcept { return order * dim + 1; }
  double weight(std::size_t row, std::size_t col) const { return weights[row * cols() + col]; }
};

/// Stored predictions keyed by (trajectory id, t); rows are steps t+1, t+2, ...
struct PredictionTable {
  std::size_t dim = 0;
  std::map<std::pair<std::string, Step>, std::vector<std::vector<double>>> rows;
};

enum class PredictorKind { HoldLast, Autoregressive, External };

const char* predictor_kind_name(PredictorKind kind) noexcept;

class Predictor {
 public:
  static Predictor hold_last();
  static Predictor autoregressive(ArModel model);
  static Predictor external(PredictionTable table);

  PredictorKind kind() const noexcept { return kind_; }
  /// Interval::kInf when unlimited.
  Step max_horizon() const noexcept;
  const ArModel& ar() const;
  const PredictionTable& table() const;

  /// Predictions for steps t+1..t+H where t = prefix length - 1. Only the
  /// states in `prefix` are visible to the predictor.
  Signal predict(const Trajectory& prefix, Step horizon) const;

  /// Throws Error(MissingId) unless every trajectory has stored predictions
  /// for (id, t) up to t+H. No-op for model-based predictors.
  void require_coverage(std::span<const Trajectory> data, Step t, Step horizon) const;

 private:
  PredictorKind kind_ = PredictorKind::HoldLast;
  ArModel ar_;
  PredictionTable table_;
};

/// Ordinary least squares (minimum-norm when rank deficient) over all
/// one-step windows with target index <= t+H.
Predictor fit_ar(std::span<const Trajectory> train, std::size_t order, Step t, Step horizon);

/// Load a prediction table file (`traj_id,t,tau,x1..xn`).
Predictor load_external(const std::filesystem::path& path);

}  // namespace stlcp
