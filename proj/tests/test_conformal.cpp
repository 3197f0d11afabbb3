#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stlcp/conformal.hpp"
#include "stlcp/error.hpp"

using namespace stlcp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> uniform_scores(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(k);
  for (auto& s : v) s = u(rng);
  return v;
}

// number of scores <= c, counted directly
std::size_t count_at_most(const std::vector<double>& v, double c) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double s) { return s <= c; }));
}

}  // namespace

TEST(Rank, Examples) {
  EXPECT_EQ(conformal_rank(200, 0.05), 191u);
  EXPECT_EQ(conformal_rank(9, 0.05), 10u);
  EXPECT_EQ(conformal_rank(1, 0.5), 1u);
  EXPECT_EQ(conformal_rank(100, 0.05), 96u);
  EXPECT_EQ(conformal_rank(5680, 0.05 / 200), 5680u);
  EXPECT_EQ(conformal_rank(200, 0.05 / 200), 201u);
  EXPECT_EQ(conformal_rank(0, 0.5), 1u);
  EXPECT_THROW(conformal_rank(10, 0.0), Error);
  EXPECT_THROW(conformal_rank(10, 1.0), Error);
  EXPECT_THROW(conformal_rank(10, std::nan("")), Error);
}

TEST(Region, Examples) {
  auto v = uniform_scores(200, 1);
  auto r = quantile_region(ScoreSet(v), 0.05);
  EXPECT_EQ(r.rank, 191u);
  EXPECT_EQ(r.count, 200u);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(r.value, sorted[190]);
  EXPECT_GE(count_at_most(v, r.value), 191u);
  EXPECT_TRUE(r.finite());

  auto none = quantile_region(ScoreSet(uniform_scores(9, 2)), 0.05);
  EXPECT_EQ(none.rank, 10u);
  EXPECT_EQ(none.value, kInf);
  EXPECT_FALSE(none.finite());

  auto one = quantile_region(ScoreSet({0.7}), 0.5);
  EXPECT_EQ(one.value, 0.7);

  auto empty = quantile_region(ScoreSet(std::vector<double>{}), 0.5);
  EXPECT_EQ(empty.value, kInf);
}

TEST(Region, TiesCountSeparately) {
  auto r = quantile_region(ScoreSet({1.0, 1.0, 1.0, 2.0}), 0.4);  // p = ceil(5 * 0.6) = 3
  EXPECT_EQ(r.rank, 3u);
  EXPECT_EQ(r.value, 1.0);
}

TEST(Region, RejectsNonFinite) {
  EXPECT_THROW(ScoreSet({1.0, std::nan("")}), Error);
  EXPECT_THROW(ScoreSet({kInf}), Error);
}

TEST(Region, MonotoneInDeltaAndPermutationInvariant) {
  auto v = uniform_scores(150, 9);
  double prev = kInf;
  for (double d = 0.01; d < 0.99; d += 0.01) {
    const double c = quantile_region(ScoreSet(v), d).value;
    EXPECT_LE(c, prev);
    prev = c;
  }
  auto shuffled = v;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(quantile_region(ScoreSet(shuffled), 0.1).value, quantile_region(ScoreSet(v), 0.1).value);
  }
}

TEST(Scores, Direct) {
  EXPECT_EQ(direct_score(2.0, 1.5), 0.5);
  EXPECT_EQ(direct_score(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(direct_score(-0.3, 0.4), -0.7);
  EXPECT_THROW(direct_score(kInf, 1.0), Error);
}

TEST(Scores, State) {
  auto x = Signal(1, {0.0, 1.0, 5.0});
  EXPECT_EQ(state_scores(x, Signal(1, {1.0, 5.0}), 0, 2, Norm::L2), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(state_scores(x, Signal(1, {1.0, 3.0}), 0, 2, Norm::L2), (std::vector<double>{0.0, 2.0}));
  auto y = Signal::from_rows({{0, 0}, {3, 4}});
  auto yh = Signal::from_rows({{0, 0}});
  EXPECT_DOUBLE_EQ(state_scores(y, yh, 0, 1, Norm::L2)[0], 5.0);
  EXPECT_DOUBLE_EQ(state_scores(y, yh, 0, 1, Norm::Linf)[0], 4.0);
  EXPECT_THROW(state_scores(x, Signal(1, {1.0}), 0, 2, Norm::L2), Error);
  EXPECT_THROW(state_scores(x, Signal(1, {1.0, 2.0, 3.0}), 1, 3, Norm::L2), Error);
}

TEST(Timewise, Examples) {
  std::vector<ScoreSet> per_step;
  for (int s = 0; s < 3; ++s) per_step.emplace_back(uniform_scores(200, 10 + s));
  auto regions = timewise_regions(per_step, 0.05, 3);
  ASSERT_EQ(regions.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(regions[i].rank, conformal_rank(200, 0.05 / 3));
    EXPECT_EQ(regions[i].value, quantile_region(per_step[i], 0.05 / 3).value);
  }
  // H = 1 reduces to the plain region
  std::vector<ScoreSet> single{per_step[0]};
  EXPECT_EQ(timewise_regions(single, 0.05, 1)[0].value, quantile_region(per_step[0], 0.05).value);

  std::vector<ScoreSet> many(200, ScoreSet(uniform_scores(200, 5)));
  for (const auto& r : timewise_regions(many, 0.05, 200)) EXPECT_EQ(r.value, kInf);

  EXPECT_THROW(timewise_regions(per_step, 0.05, 2), Error);
  EXPECT_THROW(timewise_regions({}, 0.05, 0), Error);
}

TEST(Region, CoverageMonteCarlo) {
  // fresh score <= C with frequency in [1 - delta, 1 - delta + 1/(k+1)] in expectation
  std::mt19937_64 rng(123);
  std::normal_distribution<double> n(0.0, 1.0);
  const int reps = 4000;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> cal(100);
    for (auto& s : cal) s = n(rng);
    covered += n(rng) <= quantile_region(ScoreSet(cal), 0.1).value;
  }
  const double freq = static_cast<double>(covered) / reps;
  EXPECT_GT(freq, 0.88);
  EXPECT_LT(freq, 0.935);
}
