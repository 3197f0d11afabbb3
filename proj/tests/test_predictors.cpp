#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stlcp/conformal.hpp"
#include "stlcp/error.hpp"
#include "stlcp/predictors.hpp"

using namespace stlcp;

namespace {

Trajectory make(std::string id, std::vector<double> v) { return {std::move(id), Signal(1, std::move(v))}; }

// x_{s+1} = a x_s + b from x_0
std::vector<Trajectory> linear_data(double a, double b, std::size_t count, std::size_t length) {
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> v{0.1 * static_cast<double>(i + 1)};
    while (v.size() < length) v.push_back(a * v.back() + b);
    out.push_back(make(std::to_string(i), v));
  }
  return out;
}

}  // namespace

TEST(HoldLast, RepeatsLastState) {
  auto p = Predictor::hold_last();
  auto pred = p.predict(make("a", {1.0, 7.5}), 3);
  EXPECT_EQ(pred, Signal(1, {7.5, 7.5, 7.5}));
  EXPECT_THROW(p.predict(make("a", {}), 1), Error);
}

TEST(Ar, IdentityDynamics) {
  auto p = fit_ar(linear_data(1.0, 0.0, 20, 12), 1, 5, 4);
  EXPECT_NEAR(p.ar().weight(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(p.ar().weight(0, 1), 0.0, 1e-9);
  auto pred = p.predict(observed_prefix(make("q", {3, 3, 3, 3, 3, 3, 3}), 5), 4);
  for (double v : pred.values()) EXPECT_NEAR(v, 3.0, 1e-9);
}

TEST(Ar, Doubling) {
  auto p = fit_ar(linear_data(2.0, 0.0, 10, 8), 1, 3, 3);
  EXPECT_NEAR(p.ar().weight(0, 0), 2.0, 1e-9);
}

TEST(Ar, HandRollout) {
  ArModel m;
  m.order = 1;
  m.dim = 1;
  m.t = 0;
  m.max_horizon = 3;
  m.weights = {1.0, 1.0};
  auto p = Predictor::autoregressive(m);
  EXPECT_EQ(p.predict(make("z", {0.0}), 3), Signal(1, {1.0, 2.0, 3.0}));
  EXPECT_THROW(p.predict(make("z", {0.0}), 4), Error);
  EXPECT_THROW(p.predict(make("z", {0.0, 1.0}), 3), Error);
}

TEST(Ar, RecoversNoiselessLinearSystem) {
  // 2-d rotation-like dynamics with offset
  std::vector<Trajectory> train, val;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto simulate = [&](std::string id) {
    std::vector<double> v{u(rng), u(rng)};
    for (int s = 1; s < 30; ++s) {
      const double x = v[v.size() - 2], y = v[v.size() - 1];
      v.push_back(0.9 * x - 0.2 * y + 0.1);
      v.push_back(0.2 * x + 0.9 * y - 0.05);
    }
    return Trajectory{std::move(id), Signal(2, v)};
  };
  for (int i = 0; i < 50; ++i) train.push_back(simulate("t" + std::to_string(i)));
  for (int i = 0; i < 10; ++i) val.push_back(simulate("v" + std::to_string(i)));
  auto p = fit_ar(train, 2, 10, 15);
  for (const auto& x : val) {
    auto pred = p.predict(observed_prefix(x, 10), 15);
    for (double r : state_scores(x.states, pred, 10, 15, Norm::L2)) EXPECT_LE(r, 1e-6);
  }
}

TEST(Ar, RankDeficientUsesMinimumNorm) {
  // constant trajectories: the lag column equals the intercept column up to scale
  std::vector<Trajectory> train;
  for (int i = 0; i < 5; ++i) train.push_back(make(std::to_string(i), std::vector<double>(10, 2.0)));
  auto p = fit_ar(train, 1, 4, 3);
  // minimum-norm solution of 2w + b = 2 is w = 0.8, b = 0.4
  EXPECT_NEAR(p.ar().weight(0, 0), 0.8, 1e-9);
  EXPECT_NEAR(p.ar().weight(0, 1), 0.4, 1e-9);
  auto pred = p.predict(observed_prefix(train[0], 4), 3);
  for (double v : pred.values()) EXPECT_NEAR(v, 2.0, 1e-9);
}

TEST(Ar, NoLookahead) {
  auto train = linear_data(0.95, 0.1, 30, 20);
  auto p = fit_ar(train, 2, 8, 5);
  auto x = train[3];
  auto poisoned = x;
  std::vector<double> v(poisoned.states.values().begin(), poisoned.states.values().end());
  for (std::size_t s = 9; s < v.size(); ++s) v[s] = 1e9;
  poisoned.states = Signal(1, v);
  EXPECT_EQ(p.predict(observed_prefix(x, 8), 5), p.predict(observed_prefix(poisoned, 8), 5));

  // training targets past t + H are never read
  auto train_poisoned = train;
  for (auto& tr : train_poisoned) {
    std::vector<double> w(tr.states.values().begin(), tr.states.values().end());
    for (std::size_t s = 14; s < w.size(); ++s) w[s] = -1e9;
    tr.states = Signal(1, w);
  }
  EXPECT_EQ(fit_ar(train_poisoned, 2, 8, 5).ar().weights, p.ar().weights);
}

TEST(Ar, Deterministic) {
  auto train = linear_data(0.7, 0.3, 25, 15);
  EXPECT_EQ(fit_ar(train, 3, 6, 6).ar().weights, fit_ar(train, 3, 6, 6).ar().weights);
}

TEST(Ar, WhiteNoiseTargetsPredictTheMean) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(4.0, 1.0);
  std::vector<Trajectory> train;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> v(12);
    for (auto& s : v) s = n(rng);
    train.push_back(make(std::to_string(i), v));
  }
  auto p = fit_ar(train, 1, 5, 3);
  auto pred = p.predict(observed_prefix(train[0], 5), 3);
  EXPECT_NEAR(pred.values()[2], 4.0, 0.25);
  EXPECT_NEAR(p.ar().weight(0, 0), 0.0, 0.1);
}

TEST(Ar, Errors) {
  auto train = linear_data(1.0, 0.0, 5, 6);
  EXPECT_THROW(fit_ar(train, 0, 3, 2), Error);
  EXPECT_THROW(fit_ar(train, 1, 3, 3), Error);  // needs length 7
  EXPECT_THROW(fit_ar(std::vector<Trajectory>{}, 1, 3, 2), Error);
}

TEST(External, Lookup) {
  PredictionTable table;
  table.dim = 1;
  table.rows[{"a", 1}] = {{5.0}, {6.0}};
  auto p = Predictor::external(table);
  EXPECT_EQ(p.predict(make("a", {0, 1}), 2), Signal(1, {5.0, 6.0}));
  EXPECT_EQ(p.predict(make("a", {0, 1}), 1), Signal(1, {5.0}));
  try {
    p.predict(make("b", {0, 1}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingId);
  }
  EXPECT_THROW(p.predict(make("a", {0, 1}), 3), Error);
  EXPECT_THROW(p.predict(make("a", {0}), 1), Error);
}

TEST(Split, SizesAndFractions) {
  std::vector<Trajectory> all;
  for (int i = 0; i < 10; ++i) all.push_back(make(std::to_string(i), {0.0}));
  auto s = split_dataset(all, 5, 3, 2);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.val.front().id, "5");
  EXPECT_EQ(s.test.back().id, "9");
  EXPECT_THROW(split_dataset(all, 5, 3, 3), Error);
  auto f = split_dataset(all);
  EXPECT_EQ(f.train.size(), 7u);
  EXPECT_EQ(f.val.size(), 2u);
  EXPECT_EQ(f.test.size(), 1u);
  all.push_back(make("3", {0.0}));
  EXPECT_THROW(split_dataset(all, 5, 3, 3), Error);
}

TEST(Prefix, Concat) {
  auto x = make("a", {1, 2, 3, 4});
  auto pre = observed_prefix(x, 1);
  EXPECT_EQ(pre.states, Signal(1, {1, 2}));
  EXPECT_THROW(observed_prefix(x, 4), Error);
  EXPECT_EQ(concat_prediction(pre.states, Signal(1, {9})), Signal(1, {1, 2, 9}));
}
