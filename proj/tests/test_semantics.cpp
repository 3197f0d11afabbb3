#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracle.hpp"
#include "print.hpp"
#include "stlcp/error.hpp"
#include "stlcp/parser.hpp"
#include "stlcp/semantics.hpp"

using namespace stlcp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Signal column(std::vector<double> v) { return Signal(1, std::move(v)); }

double robust(const std::string& text, const Signal& x, Step tau, Schema schema = {{"x"}}) {
  return eval_robust(BoundFormula(parse(text), schema), x, tau);
}

bool holds(const std::string& text, const Signal& x, Step tau, Schema schema = {{"x"}}) {
  return eval_bool(BoundFormula(parse(text), schema), x, tau);
}

Signal to_signal(const oracle::Rows& rows) { return Signal::from_rows(rows); }

}  // namespace

TEST(Bool, Examples) {
  EXPECT_TRUE(holds("x >= 1", column({2}), 0));
  EXPECT_FALSE(holds("G[0,2](x >= 0)", column({1, 2, -1}), 0));
  Schema ab{{"a", "b"}};
  auto x = Signal::from_rows({{1, -1}, {1, -1}, {-5, 3}});
  EXPECT_TRUE(holds("(a >= 0) U[1,2] (b >= 0)", x, 0, ab));
  // empty candidate set: nothing before step 0
  EXPECT_FALSE(holds("O[1,3](x >= 0)", column({5, 5}), 0));
  EXPECT_TRUE(holds("H[1,3](x >= 0)", column({5, 5}), 0));
}

TEST(Robust, Examples) {
  EXPECT_EQ(robust("G[0,2](x >= 0)", column({1, 2, 0.5}), 0), 0.5);
  EXPECT_EQ(robust("True", column({0}), 0), kInf);
  EXPECT_EQ(robust("!(x >= 0)", column({3}), 0), -3.0);
  EXPECT_EQ(robust("F[1,2](x >= 0)", column({9, -1, 0.25}), 0), 0.25);
  // until with an empty inner range takes the right operand directly
  EXPECT_EQ(robust("(x >= 100) U[1,1] (x >= 0)", column({0, 4}), 0), 4.0);
  EXPECT_EQ(robust("(x >= 0) S[1,2] (x >= 10)", column({12, 3, 7}), 2), 2.0);
  Schema xy{{"x", "y"}};
  EXPECT_DOUBLE_EQ(robust("norm2(x, y) <= 5", Signal::from_rows({{3, 4}}), 0, xy), 0.0);
  EXPECT_DOUBLE_EQ(robust("2*x - y >= 1", Signal::from_rows({{3, 4}}), 0, xy), 1.0);
}

TEST(Robust, Errors) {
  EXPECT_THROW(robust("G[0,3](x >= 0)", column({1, 2, 3}), 0), Error);
  EXPECT_THROW(robust("y >= 0", column({1}), 0), Error);
  try {
    eval_robust(BoundFormula(parse("x >= 0"), Schema{{"x"}}), Signal::from_rows({{1, 2}}), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
  EXPECT_THROW(BoundFormula(parse("F[0,inf](x >= 0)"), Schema{{"x"}}), Error);
}

TEST(Robust, MatchesNaiveEvaluator) {
  oracle::FormulaGen gen(2024, 2);
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    auto f = gen(3);
    const Step len = formula_length(f);
    if (len > 9) continue;
    auto rows = oracle::random_rows(gen.rng(), 10, 2);
    BoundFormula bf(f, Schema::numbered(2));
    for (Step tau = 0; tau + len < 10; ++tau) {
      const double want = oracle::robust(f, rows, tau);
      const double got = eval_robust(bf, to_signal(rows), tau);
      if (std::isinf(want)) {
        EXPECT_EQ(got, want) << render(f);
      } else {
        EXPECT_NEAR(got, want, 1e-12) << render(f);
      }
      EXPECT_EQ(eval_bool(bf, to_signal(rows), tau), oracle::satisfied(f, rows, tau)) << render(f);
      ++compared;
    }
  }
  EXPECT_GT(compared, 500);
}

TEST(Robust, SignAgreesWithBool) {
  oracle::FormulaGen gen(7, 3);
  for (int i = 0; i < 300; ++i) {
    auto f = gen(4);
    const Step len = formula_length(f);
    if (len > 11) continue;
    auto x = to_signal(oracle::random_rows(gen.rng(), 12, 3));
    BoundFormula bf(f, Schema::numbered(3));
    const double r = eval_robust(bf, x, 0);
    if (r > 0) EXPECT_TRUE(eval_bool(bf, x, 0)) << render(f);
    if (r < 0) EXPECT_FALSE(eval_bool(bf, x, 0)) << render(f);
  }
}

TEST(Robust, PrefixSufficiency) {
  oracle::FormulaGen gen(31, 1);
  for (int i = 0; i < 300; ++i) {
    auto f = gen(4);
    const Step len = formula_length(f);
    if (len > 11) continue;
    auto x = to_signal(oracle::random_rows(gen.rng(), 30, 1));
    BoundFormula bf(f, Schema::numbered(1));
    for (Step tau : {Step{0}, Step{5}, Step{30 - len - 1}}) {
      const auto prefix = x.prefix(static_cast<std::size_t>(tau + len + 1));
      EXPECT_EQ(eval_robust(bf, prefix, tau), eval_robust(bf, x, tau)) << render(f);
    }
  }
}

TEST(InfBall, Examples) {
  auto h = PredicateFn::affine({1.0, 0.0}, -750.0);
  std::vector<double> c{900.0, 3.0};
  EXPECT_DOUBLE_EQ(inf_ball(h, c, 50.0, Norm::L2), 100.0);
  EXPECT_EQ(inf_ball(h, c, 0.0, Norm::L2), h(c));
  EXPECT_EQ(inf_ball(h, c, kInf, Norm::L2), -kInf);

  auto g = PredicateFn::generic([](std::span<const double>) { return 0.3; }, 1.0, Norm::L2, 1);
  std::vector<double> z{0.0};
  EXPECT_DOUBLE_EQ(inf_ball(g, z, 0.5, Norm::L2), -0.2);
  try {
    inf_ball(g, z, 0.5, Norm::Linf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NormMismatch);
  }
  EXPECT_THROW(inf_ball(h, c, -1.0, Norm::L2), Error);

  // dual norms: Linf ball pairs with the L1 norm of the gradient
  auto d = PredicateFn::affine({3.0, -4.0}, 0.0);
  std::vector<double> o{0.0, 0.0};
  EXPECT_DOUBLE_EQ(inf_ball(d, o, 1.0, Norm::L2), -5.0);
  EXPECT_DOUBLE_EQ(inf_ball(d, o, 1.0, Norm::Linf), -7.0);
  // constant predicate is unaffected even by an unbounded ball
  EXPECT_EQ(inf_ball(PredicateFn::affine({0.0, 0.0}, 2.0), o, kInf, Norm::L2), 2.0);
}

TEST(InfBall, AffineMatchesBoundarySweep) {
  // the minimum of an affine function over a 2-d ball lies on its boundary
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto h = PredicateFn::affine({u(rng), u(rng)}, u(rng));
    std::vector<double> c{u(rng), u(rng)};
    const double r = std::fabs(u(rng));
    double best = kInf;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * M_PI * i / n;
      std::vector<double> p{c[0] + r * std::cos(a), c[1] + r * std::sin(a)};
      best = std::min(best, h(p));
    }
    EXPECT_NEAR(inf_ball(h, c, r, Norm::L2), best, 1e-6);
    // Linf ball: the minimum sits on a corner
    double corner = kInf;
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) {
        std::vector<double> p{c[0] + sx * r, c[1] + sy * r};
        corner = std::min(corner, h(p));
      }
    EXPECT_NEAR(inf_ball(h, c, r, Norm::Linf), corner, 1e-12);
  }
}

TEST(WorstCase, Examples) {
  auto f = BoundFormula(parse("G[0,1](x >= 0)"), Schema{{"x"}});
  BallFamily balls{column({5, 3}), 0, {1.0}, Norm::L2};
  EXPECT_DOUBLE_EQ(eval_worst_case(f, balls, 0), 2.0);

  BallFamily zero{column({5, 3}), 0, {0.0}, Norm::L2};
  EXPECT_EQ(eval_worst_case(f, zero, 0), eval_robust(f, zero.center, 0));

  BallFamily unbounded{column({5, 3}), 0, {kInf}, Norm::L2};
  EXPECT_EQ(eval_worst_case(f, unbounded, 0), -kInf);

  auto neg = BoundFormula(parse("!(x >= 0)"), Schema{{"x"}});
  try {
    eval_worst_case(neg, zero, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPnf);
  }
  BallFamily short_radii{column({5, 3}), 0, {}, Norm::L2};
  EXPECT_THROW(eval_worst_case(f, short_radii, 0), Error);
}

TEST(WorstCase, LowerBoundAndMonotoneInRadii) {
  oracle::FormulaGen gen(77, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    auto f = to_pnf(gen(4));
    const Step len = formula_length(f);
    if (len > 11) continue;
    auto x = to_signal(oracle::random_rows(gen.rng(), 12, 2));
    const Step t = static_cast<Step>(gen.rng()() % 4);
    BoundFormula bf(f, Schema::numbered(2));
    std::vector<double> radii(static_cast<std::size_t>(11 - t));
    for (auto& r : radii) r = u(gen.rng());
    BallFamily balls{x, t, radii, Norm::L2};
    const double wc = eval_worst_case(bf, balls, 0);
    EXPECT_LE(wc, eval_robust(bf, x, 0)) << render(f);

    auto wider = balls;
    for (auto& r : wider.radii) r += u(gen.rng());
    EXPECT_LE(eval_worst_case(bf, wider, 0), wc) << render(f);

    auto point = balls;
    for (auto& r : point.radii) r = 0.0;
    EXPECT_EQ(eval_worst_case(bf, point, 0), eval_robust(bf, x, 0)) << render(f);
  }
}

TEST(WorstCase, Diagnostics) {
  Schema xy{{"x", "y"}};
  auto f = BoundFormula(parse("G[0,2](x >= 0) && F[0,1](y >= 1)"), xy);
  auto c = Signal::from_rows({{4, 0}, {3, 2}, {2, 5}});
  BallFamily balls{c, 0, {0.5, 0.5}, Norm::L2};
  auto d = worst_case_diagnostics(f, balls, 0);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].label, "x >= 0");
  EXPECT_EQ(d[0].first, 0);
  EXPECT_EQ(d[0].last, 2);
  EXPECT_DOUBLE_EQ(d[0].min_value, 1.5);
  EXPECT_EQ(d[1].label, "y >= 1");
  EXPECT_EQ(d[1].last, 1);
  EXPECT_DOUBLE_EQ(d[1].min_value, -1.0);
}

TEST(Signal, Shape) {
  auto s = Signal::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s.length(), 2u);
  EXPECT_EQ(s.at(1)[0], 3.0);
  EXPECT_EQ(s.prefix(1).length(), 1u);
  EXPECT_THROW(Signal::from_rows({{1, 2}, {3}}), Error);
  EXPECT_THROW(Signal(2, {1.0, 2.0, 3.0}), Error);
}
