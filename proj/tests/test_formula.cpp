#include <gtest/gtest.h>

#include "oracle.hpp"
#include "print.hpp"
#include "stlcp/error.hpp"
#include "stlcp/formula.hpp"
#include "stlcp/parser.hpp"

using namespace stlcp;

namespace {

Formula pred(const std::string& var, double threshold) {
  return Formula::predicate(Atom::linear({{1.0, var}}, -threshold));
}

ErrorCode parse_code(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a parse failure for " << text;
  return ErrorCode::Internal;
}

std::size_t parse_position(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "expected a parse failure for " << text;
  return 0;
}

}  // namespace

TEST(Parse, AltitudeSpec) {
  auto f = parse("G[0,200](h >= 750)");
  EXPECT_EQ(f, Formula::always(make_interval(0, 200), pred("h", 750)));
  EXPECT_EQ(f.child(0).atom().offset, -750.0);
  EXPECT_EQ(render(f), "G[0,200](h >= 750)");
}

TEST(Parse, TrueNode) {
  EXPECT_EQ(parse("True").kind(), NodeKind::True);
  EXPECT_EQ(parse("  True ").kind(), NodeKind::True);
}

TEST(Parse, UntilIsInfix) {
  auto f = parse("(a >= 0) U[2,5] (b >= 1)");
  EXPECT_EQ(f, Formula::until(make_interval(2, 5), pred("a", 0), pred("b", 1)));
}

TEST(Parse, ComparisonsNormalizeToNonNegativeForm) {
  // x <= 3  <=>  -x + 3 >= 0
  auto le = parse("x <= 3").atom();
  ASSERT_EQ(le.terms.size(), 1u);
  EXPECT_EQ(le.terms[0].coef, -1.0);
  EXPECT_EQ(le.offset, 3.0);
  EXPECT_EQ(parse("x > 3"), parse("x >= 3"));
  EXPECT_EQ(parse("x < 3"), parse("x <= 3"));

  auto lin = parse("2*x - 0.5*y >= 1").atom();
  ASSERT_EQ(lin.terms.size(), 2u);
  EXPECT_EQ(lin.terms[1].coef, -0.5);
  EXPECT_EQ(lin.offset, -1.0);

  auto n = parse("norm2(p, q) <= 2").atom();
  EXPECT_EQ(n.kind, Atom::Kind::Norm2);
  EXPECT_EQ(n.sign, -1.0);
  EXPECT_EQ(n.offset, 2.0);
}

TEST(Parse, Precedence) {
  // ! binds tighter than temporal operators, which bind tighter than && and ||
  auto f = parse("!a >= 0 && F[0,1] b >= 0 || c >= 0");
  ASSERT_EQ(f.kind(), NodeKind::Or);
  ASSERT_EQ(f.child(0).kind(), NodeKind::And);
  EXPECT_EQ(f.child(0).child(0).kind(), NodeKind::Not);
  EXPECT_EQ(f.child(0).child(1).kind(), NodeKind::Eventually);
}

TEST(Parse, PastOperators) {
  EXPECT_EQ(parse("O[1,2](x >= 0)").kind(), NodeKind::Once);
  EXPECT_EQ(parse("H[0,3](x >= 0)").kind(), NodeKind::Historically);
  EXPECT_EQ(parse("(x >= 0) S[0,4] (y >= 0)").kind(), NodeKind::Since);
}

TEST(Parse, OperatorLettersAreNamesWithoutBracket) {
  auto f = parse("G >= 1 && F <= 2");
  EXPECT_EQ(f.child(0).atom().terms[0].var, "G");
  EXPECT_EQ(f.child(1).atom().terms[0].var, "F");
}

TEST(Parse, InternalFormsNeedOptIn) {
  EXPECT_EQ(parse_code("(x >= 0) R[0,2] (y >= 0)"), ErrorCode::Parse);
  EXPECT_EQ(parse_code("False"), ErrorCode::Parse);
  auto r = parse("(x >= 0) R[0,2] (y >= 0)", ParseOptions{true});
  EXPECT_EQ(r.kind(), NodeKind::Release);
  EXPECT_EQ(parse("False", ParseOptions{true}).kind(), NodeKind::False);
}

TEST(Parse, Errors) {
  EXPECT_EQ(parse_code("G[3,1](x >= 0)"), ErrorCode::Parse);
  EXPECT_EQ(parse_code("G[-1,2](x >= 0)"), ErrorCode::Parse);
  EXPECT_EQ(parse_code("G[0.5,2](x >= 0)"), ErrorCode::Parse);
  EXPECT_EQ(parse_code("X[0,2](x >= 0)"), ErrorCode::Parse);
  EXPECT_EQ(parse_code("x >= "), ErrorCode::Parse);
  EXPECT_EQ(parse_code("(x >= 0"), ErrorCode::Parse);
  EXPECT_EQ(parse_code("x >= 0 y"), ErrorCode::Parse);
  EXPECT_EQ(parse_code(""), ErrorCode::Parse);
  EXPECT_EQ(parse_code("U[0,1](x >= 0)"), ErrorCode::Parse);
}

TEST(Parse, ErrorPositions) {
  EXPECT_EQ(parse_position("G[0,2(x>=1)"), 5u);
  EXPECT_EQ(parse_position("x >= 0 y"), 7u);
  EXPECT_EQ(parse_position("G[5,1](x >= 0)"), 1u);
}

TEST(Parse, UnboundedInterval) {
  auto f = parse("G[10,inf](x >= 0)");
  EXPECT_FALSE(f.interval().bounded());
  EXPECT_FALSE(is_bounded(f));
  EXPECT_THROW(formula_length(f), Error);
  auto g = truncate_unbounded(f, 40);
  EXPECT_EQ(g.interval().hi, 40);
  EXPECT_EQ(formula_length(g), 40);
  // past operators may stay unbounded
  EXPECT_TRUE(is_bounded(parse("O[0,inf](x >= 0)")));
}

TEST(Length, Examples) {
  EXPECT_EQ(formula_length(parse("x >= 0")), 0);
  EXPECT_EQ(formula_length(parse("True")), 0);
  EXPECT_EQ(formula_length(parse("G[0,200](h >= 750)")), 200);
  EXPECT_EQ(formula_length(parse("((a >= 0) U[2,5] (b >= 0)) && ((c >= 0) U[0,9] (d >= 0))")), 9);
  EXPECT_EQ(formula_length(parse("F[1,3](G[0,2](x >= 0))")), 5);
  EXPECT_EQ(formula_length(parse("!F[0,4](x >= 0)")), 4);
  // past operators add nothing on top of their operands
  EXPECT_EQ(formula_length(parse("O[0,7](x >= 0)")), 0);
  EXPECT_EQ(formula_length(parse("H[0,7](F[0,2](x >= 0))")), 2);
}

TEST(Length, MonotoneUnderConjunction) {
  oracle::FormulaGen gen(11, 2);
  for (int i = 0; i < 200; ++i) {
    auto a = gen(3), b = gen(3);
    const auto la = formula_length(a), lb = formula_length(b);
    EXPECT_LE(la, formula_length(Formula::conjunction(a, b)));
    EXPECT_LE(lb, formula_length(Formula::disjunction(a, b)));
  }
}

TEST(Horizon, Examples) {
  EXPECT_EQ(horizon(230, 230, 200).horizon, 200);
  EXPECT_EQ(horizon(0, 0, 0).horizon, 0);
  EXPECT_FALSE(horizon(0, 0, 0).needs_prediction());
  EXPECT_EQ(horizon(0, 100, 250).horizon, 150);
  EXPECT_EQ(horizon(0, 20, 10).horizon, -10);
  EXPECT_THROW(horizon(-1, 0, 0), Error);
}

TEST(Pnf, Examples) {
  auto mu = parse("x >= 1");
  EXPECT_EQ(to_pnf(parse("!!(x >= 1)")), mu);

  auto dm = to_pnf(parse("!((x >= 1) && (y >= 2))"));
  EXPECT_EQ(dm, parse("(x <= 1) || (y <= 2)"));

  auto g = to_pnf(parse("!G[0,3](x >= 1)"));
  EXPECT_EQ(g, parse("F[0,3](x <= 1)"));

  auto u = to_pnf(parse("!((x >= 1) U[1,2] (y >= 0))"));
  EXPECT_EQ(u, parse("(x <= 1) R[1,2] (y <= 0)", ParseOptions{true}));

  auto s = to_pnf(parse("!((x >= 1) S[0,2] (y >= 0))"));
  EXPECT_EQ(s.kind(), NodeKind::Trigger);

  EXPECT_EQ(to_pnf(parse("!True")).kind(), NodeKind::False);
  EXPECT_EQ(to_pnf(parse("!O[0,2](x >= 0)")).kind(), NodeKind::Historically);
  EXPECT_EQ(to_pnf(parse("!norm2(a, b) >= 1")), parse("norm2(a, b) < 1"));
}

TEST(Pnf, HasNoNegationsAndIsIdempotent) {
  oracle::FormulaGen gen(5, 3);
  for (int i = 0; i < 500; ++i) {
    auto f = gen(4);
    auto p = to_pnf(f);
    EXPECT_TRUE(is_pnf(p)) << render(f);
    EXPECT_EQ(to_pnf(p), p);
    EXPECT_EQ(formula_length(p), formula_length(f));
  }
}

TEST(Render, RoundTrip) {
  oracle::FormulaGen gen(99, 3);
  for (int i = 0; i < 1000; ++i) {
    auto f = to_pnf(gen(4));
    const auto text = render(f);
    EXPECT_EQ(parse(text, ParseOptions{true}), f) << text;
  }
  oracle::FormulaGen raw(100, 2);
  for (int i = 0; i < 1000; ++i) {
    auto f = raw(4);
    EXPECT_EQ(parse(render(f)), f) << render(f);
  }
}

TEST(Render, Shapes) {
  EXPECT_EQ(render(parse("(a>=0)U[2,5](b>=1)")), "(a >= 0) U[2,5] (b >= 1)");
  EXPECT_EQ(render(parse("!(x < 2)")), "!(x <= 2)");
  EXPECT_EQ(render(parse("2*x - y >= 1")), "2*x - y >= 1");
  EXPECT_EQ(render(parse("norm2(a,b) <= 0.25")), "norm2(a, b) <= 0.25");
  EXPECT_EQ(render(parse("G[10,inf](x >= 0)")), "G[10,inf](x >= 0)");
}

TEST(Hash, StableAndStructural) {
  EXPECT_EQ(formula_hash(parse("G[0,200](h >= 750)")), formula_hash(parse("G[0,200]( h>=750 )")));
  EXPECT_NE(formula_hash(parse("G[0,200](h >= 750)")), formula_hash(parse("G[0,199](h >= 750)")));
  EXPECT_EQ(formula_hash(parse("x >= 1")).size(), 16u);
}

TEST(Formula, ConstructionChecks) {
  EXPECT_THROW(make_interval(2, 1), Error);
  EXPECT_THROW(make_interval(-1, 1), Error);
  EXPECT_THROW(Atom::linear({}, 0.0), Error);
  EXPECT_THROW(Atom::linear({{std::nan(""), "x"}}, 0.0), Error);
  EXPECT_EQ(node_count(parse("(x >= 0) && F[0,1](y >= 0)")), 4u);
}
