#include "stlcp/predictors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "stlcp/error.hpp"
#include "stlcp/io.hpp"

namespace stlcp {

Trajectory observed_prefix(const Trajectory& x, Step t) {
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "current time t must be >= 0");
  if (static_cast<Step>(x.states.length()) < t + 1) {
    throw Error(ErrorCode::SignalTooShort,
                "trajectory '" + x.id + "' has not been observed up to step " + std::to_string(t));
  }
  return Trajectory{x.id, x.states.prefix(static_cast<std::size_t>(t + 1))};
}

Signal concat_prediction(const Signal& prefix, const Signal& predicted) {
  Signal out = prefix;
  for (std::size_t i = 0; i < predicted.length(); ++i) out.append(predicted.at(i));
  return out;
}

DatasetSplit split_dataset(std::vector<Trajectory> data, std::size_t n_train, std::size_t n_val,
                           std::size_t n_test) {
  if (n_train + n_val + n_test > data.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "split sizes " + std::to_string(n_train) + "/" + std::to_string(n_val) + "/" +
                    std::to_string(n_test) + " exceed " + std::to_string(data.size()) +
                    " trajectories");
  }
  std::set<std::string> ids;
  for (const auto& x : data) {
    if (!ids.insert(x.id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate trajectory id '" + x.id + "'");
    }
  }
  DatasetSplit split;
  auto take = [&, pos = std::size_t{0}](std::vector<Trajectory>& out, std::size_t n) mutable {
    out.assign(std::make_move_iterator(data.begin() + static_cast<std::ptrdiff_t>(pos)),
               std::make_move_iterator(data.begin() + static_cast<std::ptrdiff_t>(pos + n)));
    pos += n;
  };
  take(split.train, n_train);
  take(split.val, n_val);
  take(split.test, n_test);
  return split;
}

DatasetSplit split_dataset(std::vector<Trajectory> data, double train_fraction,
                           double val_fraction) {
  if (!(train_fraction >= 0 && val_fraction >= 0 && train_fraction + val_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split fractions must be >= 0 and sum to <= 1");
  }
  const auto n = data.size();
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(n)));
  return split_dataset(std::move(data), n_train, n_val, n - n_train - n_val);
}

const char* predictor_kind_name(PredictorKind kind) noexcept {
  switch (kind) {
    case PredictorKind::HoldLast: return "hold-last";
    case PredictorKind::Autoregressive: return "ar";
    case PredictorKind::External: return "external";
  }
  return "?";
}

Predictor Predictor::hold_last() { return Predictor{}; }

Predictor Predictor::autoregressive(ArModel model) {
  if (model.order == 0 || model.dim == 0) {
    throw Error(ErrorCode::InvalidArgument, "AR model needs order >= 1 and dim >= 1");
  }
  if (model.weights.size() != model.dim * model.cols()) {
    throw Error(ErrorCode::Format, "AR weight matrix has the wrong size");
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "AR weights must be finite");
  }
  if (model.t < 0 || model.max_horizon < 0) {
    throw Error(ErrorCode::InvalidArgument, "AR model t and horizon must be >= 0");
  }
  Predictor p;
  p.kind_ = PredictorKind::Autoregressive;
  p.ar_ = std::move(model);
  return p;
}

Predictor Predictor::external(PredictionTable table) {
  for (const auto& [key, rows] : table.rows) {
    for (const auto& r : rows) {
      if (r.size() != table.dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "prediction for '" + key.first + "' has wrong dimension");
      }
    }
  }
  Predictor p;
  p.kind_ = PredictorKind::External;
  p.table_ = std::move(table);
  return p;
}

Step Predictor::max_horizon() const noexcept {
  switch (kind_) {
    case PredictorKind::Autoregressive: return ar_.max_horizon;
    default: return Interval::kInf;
  }
}

const ArModel& Predictor::ar() const {
  if (kind_ != PredictorKind::Autoregressive) {
    throw Error(ErrorCode::InvalidArgument, "predictor is not autoregressive");
  }
  return ar_;
}

const PredictionTable& Predictor::table() const {
  if (kind_ != PredictorKind::External) {
    throw Error(ErrorCode::InvalidArgument, "predictor is not table-backed");
  }
  return table_;
}

Signal Predictor::predict(const Trajectory& prefix, Step horizon) const {
  if (prefix.states.empty()) throw Error(ErrorCode::InvalidArgument, "empty observation prefix");
  if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
  const Step t = static_cast<Step>(prefix.states.length()) - 1;
  const std::size_t dim = prefix.states.dim();
  Signal out(dim, {});
  if (horizon > max_horizon()) {
    throw Error(ErrorCode::HorizonExceeded,
                "requested horizon " + std::to_string(horizon) + " exceeds trained horizon " +
                    std::to_string(max_horizon()));
  }
  switch (kind_) {
    case PredictorKind::HoldLast: {
      auto last = prefix.states.at(static_cast<std::size_t>(t));
      for (Step i = 0; i < horizon; ++i) out.append(last);
      return out;
    }
    case PredictorKind::Autoregressive: {
      if (dim != ar_.dim) {
        throw Error(ErrorCode::DimensionMismatch, "AR model dimension differs from trajectory");
      }
      if (t != ar_.t) {
        throw Error(ErrorCode::InvalidArgument,
                    "AR model was fitted for t=" + std::to_string(ar_.t) + ", prefix ends at t=" +
                        std::to_string(t));
      }
      // history[k] holds x_{s-k}; steps before 0 repeat x_0
      std::vector<std::vector<double>> history;
      for (std::size_t k = 0; k < ar_.order; ++k) {
        Step s = std::max<Step>(t - static_cast<Step>(k), 0);
        auto st = prefix.states.at(static_cast<std::size_t>(s));
        history.emplace_back(st.begin(), st.end());
      }
      std::vector<double> next(dim);
      for (Step i = 0; i < horizon; ++i) {
        for (std::size_t r = 0; r < dim; ++r) {
          double v = ar_.weight(r, ar_.cols() - 1);
          for (std::size_t k = 0; k < ar_.order; ++k) {
            for (std::size_t c = 0; c < dim; ++c) v += ar_.weight(r, k * dim + c) * history[k][c];
          }
          next[r] = v;
        }
        out.append(next);
        history.pop_back();
        history.insert(history.begin(), next);
      }
      return out;
    }
    case PredictorKind::External: {
      if (dim != table_.dim) {
        throw Error(ErrorCode::DimensionMismatch, "prediction table dimension differs from trajectory");
      }
      auto it = table_.rows.find({prefix.id, t});
      if (it == table_.rows.end()) {
        throw Error(ErrorCode::MissingId, "no stored predictions for trajectory '" + prefix.id +
                                              "' at t=" + std::to_string(t));
      }
      if (static_cast<Step>(it->second.size()) < horizon) {
        throw Error(ErrorCode::HorizonExceeded,
                    "stored predictions for '" + prefix.id + "' cover only " +
                        std::to_string(it->second.size()) + " steps");
      }
      for (Step i = 0; i < horizon; ++i) out.append(it->second[static_cast<std::size_t>(i)]);
      return out;
    }
  }
  throw Error(ErrorCode::Internal, "unhandled predictor kind");
}

void Predictor::require_coverage(std::span<const Trajectory> data, Step t, Step horizon) const {
  if (kind_ != PredictorKind::External) return;
  for (const auto& x : data) {
    auto it = table_.rows.find({x.id, t});
    if (it == table_.rows.end() || static_cast<Step>(it->second.size()) < horizon) {
      throw Error(ErrorCode::MissingId, "prediction table lacks trajectory '" + x.id + "' at t=" +
                                            std::to_string(t) + " for horizon " +
                                            std::to_string(horizon));
    }
  }
}

Predictor fit_ar(std::span<const Trajectory> train, std::size_t order, Step t, Step horizon) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "AR order must be >= 1");
  if (t < 0 || horizon < 0) throw Error(ErrorCode::InvalidArgument, "t and H must be >= 0");
  if (train.empty()) throw Error(ErrorCode::InvalidArgument, "no training trajectories");
  const std::size_t dim = train.front().states.dim();
  const Step last_target = t + horizon;
  const auto m = static_cast<Step>(order);
  if (last_target < m) {
    throw Error(ErrorCode::SignalTooShort, "t + H is too short for AR order " +
                                               std::to_string(order));
  }
  for (const auto& x : train) {
    if (x.states.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "training trajectories differ in dimension");
    }
    if (static_cast<Step>(x.states.length()) < last_target + 1) {
      throw Error(ErrorCode::SignalTooShort,
                  "training trajectory '" + x.id + "' is shorter than t + H + 1");
    }
  }
  const std::size_t windows_per = static_cast<std::size_t>(last_target - m + 1);
  const std::size_t rows = windows_per * train.size();
  const std::size_t cols = order * dim + 1;
  Eigen::MatrixXd features(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::MatrixXd targets(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  Eigen::Index row = 0;
  for (const auto& x : train) {
    for (Step s = m - 1; s < last_target; ++s, ++row) {
      for (std::size_t k = 0; k < order; ++k) {
        auto st = x.states.at(static_cast<std::size_t>(s - static_cast<Step>(k)));
        for (std::size_t c = 0; c < dim; ++c) {
          features(row, static_cast<Eigen::Index>(k * dim + c)) = st[c];
        }
      }
      features(row, static_cast<Eigen::Index>(cols - 1)) = 1.0;
      auto next = x.states.at(static_cast<std::size_t>(s + 1));
      for (std::size_t c = 0; c < dim; ++c) targets(row, static_cast<Eigen::Index>(c)) = next[c];
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(features);
  Eigen::MatrixXd solution = cod.solve(targets);  // cols x dim

  ArModel model;
  model.order = order;
  model.dim = dim;
  model.t = t;
  model.max_horizon = horizon;
  model.weights.resize(dim * cols);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      model.weights[r * cols + c] =
          solution(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r));
    }
  }
  return Predictor::autoregressive(std::move(model));
}

Predictor load_external(const std::filesystem::path& path) {
  return Predictor::external(read_prediction_table(path));
}

}  // namespace stlcp
