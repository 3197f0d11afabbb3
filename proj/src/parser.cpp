#include "stlcp/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>
#include <vector>

#include "stlcp/error.hpp"

namespace stlcp {
namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Bang,
  AndAnd,
  OrOr,
  Ge,
  Le,
  Gt,
  Lt,
  Plus,
  Minus,
  Star,
  End,
};

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, src.substr(i, len), i});
    i += len;
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      push(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      push(Tok::Number, j - i);
      continue;
    }
    auto next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (c) {
      case '(': push(Tok::LParen, 1); break;
      case ')': push(Tok::RParen, 1); break;
      case '[': push(Tok::LBracket, 1); break;
      case ']': push(Tok::RBracket, 1); break;
      case ',': push(Tok::Comma, 1); break;
      case '!': push(Tok::Bang, 1); break;
      case '+': push(Tok::Plus, 1); break;
      case '-': push(Tok::Minus, 1); break;
      case '*': push(Tok::Star, 1); break;
      case '&':
        if (next != '&') throw ParseError(i, "expected '&&'");
        push(Tok::AndAnd, 2);
        break;
      case '|':
        if (next != '|') throw ParseError(i, "expected '||'");
        push(Tok::OrOr, 2);
        break;
      case '>':
        if (next == '=') push(Tok::Ge, 2); else push(Tok::Gt, 1);
        break;
      case '<':
        if (next == '=') push(Tok::Le, 2); else push(Tok::Lt, 1);
        break;
      default:
        throw ParseError(i, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, {}, src.size()});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options)
      : toks_(std::move(tokens)), opts_(options) {}

  Formula parse_all() {
    Formula f = parse_or();
    if (peek().kind != Tok::End) fail(peek(), "unexpected trailing input");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t idx = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[idx];
  }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    advance();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return advance();
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::string where = t.kind == Tok::End ? "end of input" : "'" + std::string(t.text) + "'";
    throw ParseError(t.pos, msg + " near " + where);
  }

  bool is_operator(std::string_view name) const {
    return peek().kind == Tok::Ident && peek().text == name && peek(1).kind == Tok::LBracket;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (accept(Tok::OrOr)) lhs = Formula::disjunction(lhs, parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_binary();
    while (accept(Tok::AndAnd)) lhs = Formula::conjunction(lhs, parse_binary());
    return lhs;
  }

  Formula parse_binary() {
    Formula lhs = parse_unary();
    for (;;) {
      if (is_operator("U")) {
        advance();
        Interval i = parse_interval();
        lhs = Formula::until(i, lhs, parse_unary());
      } else if (is_operator("S")) {
        advance();
        Interval i = parse_interval();
        lhs = Formula::since(i, lhs, parse_unary());
      } else if (opts_.allow_internal && is_operator("R")) {
        advance();
        Interval i = parse_interval();
        lhs = Formula::release(i, lhs, parse_unary());
      } else if (opts_.allow_internal && is_operator("T")) {
        advance();
        Interval i = parse_interval();
        lhs = Formula::trigger(i, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Formula parse_unary() {
    if (accept(Tok::Bang)) return Formula::negation(parse_unary());
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::LBracket) {
      const Token& op = advance();
      if (op.text == "G" || op.text == "F" || op.text == "O" || op.text == "H") {
        Interval i = parse_interval();
        Formula body = parse_unary();
        if (op.text == "G") return Formula::always(i, body);
        if (op.text == "F") return Formula::eventually(i, body);
        if (op.text == "O") return Formula::once(i, body);
        return Formula::historically(i, body);
      }
      if (op.text == "U" || op.text == "S" ||
          (opts_.allow_internal && (op.text == "R" || op.text == "T"))) {
        fail(op, "binary operator is missing its left operand");
      }
      fail(op, "unknown operator");
    }
    return parse_primary();
  }

  Formula parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      advance();
      Formula f = parse_or();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Ident && t.text == "True") {
      advance();
      return Formula::truth();
    }
    if (t.kind == Tok::Ident && t.text == "False") {
      if (!opts_.allow_internal) fail(t, "'False' is not accepted in input formulas; use !True");
      advance();
      return Formula::falsity();
    }
    if (t.kind == Tok::Ident && t.text == "norm2" && peek(1).kind == Tok::LParen) {
      return parse_norm_atom();
    }
    if (t.kind == Tok::Ident || t.kind == Tok::Number || t.kind == Tok::Minus) {
      return parse_linear_atom();
    }
    fail(t, "expected a formula");
  }

  double parse_number() {
    const Token& t = expect(Tok::Number, "a number");
    double v = 0.0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
      fail(t, "malformed number");
    }
    return v;
  }

  double parse_signed_number() {
    bool negative = accept(Tok::Minus);
    double v = parse_number();
    return negative ? -v : v;
  }

  // Returns +1 for >=, > and -1 for <=, <.
  double parse_cmp() {
    switch (peek().kind) {
      case Tok::Ge:
      case Tok::Gt:
        advance();
        return 1.0;
      case Tok::Le:
      case Tok::Lt:
        advance();
        return -1.0;
      default:
        fail(peek(), "expected a comparison (>=, <=, >, <)");
    }
  }

  Formula parse_linear_atom() {
    std::vector<Term> terms;
    double sign = accept(Tok::Minus) ? -1.0 : 1.0;
    for (;;) {
      double coef = 1.0;
      if (peek().kind == Tok::Number) {
        coef = parse_number();
        accept(Tok::Star);
      }
      const Token& id = expect(Tok::Ident, "a signal name");
      if (id.text == "True" || id.text == "False" || id.text == "norm2") {
        fail(id, "reserved word used as a signal name");
      }
      terms.push_back(Term{sign * coef, std::string(id.text)});
      if (accept(Tok::Plus)) {
        sign = 1.0;
      } else if (accept(Tok::Minus)) {
        sign = -1.0;
      } else {
        break;
      }
    }
    double dir = parse_cmp();
    double rhs = parse_signed_number();
    // lhs >= rhs  ->  lhs - rhs >= 0;   lhs <= rhs  ->  rhs - lhs >= 0
    if (dir < 0) {
      for (auto& term : terms) term.coef = -term.coef;
      return Formula::predicate(Atom::linear(std::move(terms), rhs));
    }
    return Formula::predicate(Atom::linear(std::move(terms), -rhs));
  }

  Formula parse_norm_atom() {
    advance();  // norm2
    expect(Tok::LParen, "'('");
    std::vector<std::string> vars;
    do {
      vars.emplace_back(expect(Tok::Ident, "a signal name").text);
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    double dir = parse_cmp();
    double rhs = parse_signed_number();
    return Formula::predicate(Atom::norm2(std::move(vars), dir, -dir * rhs));
  }

  Step parse_bound() {
    if (peek().kind == Tok::Minus) fail(peek(), "malformed interval: negative bound");
    const Token& t = expect(Tok::Number, "an integer interval bound");
    Step v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ptr != t.text.data() + t.text.size()) {
      fail(t, "malformed interval: bounds must be integer step counts");
    }
    if (res.ec != std::errc()) fail(t, "malformed interval: bound out of range");
    return v;
  }

  Interval parse_interval() {
    const Token& open = expect(Tok::LBracket, "'['");
    Step lo = parse_bound();
    expect(Tok::Comma, "','");
    Step hi = Interval::kInf;
    if (peek().kind == Tok::Ident && peek().text == "inf") {
      advance();
    } else {
      hi = parse_bound();
    }
    expect(Tok::RBracket, "']'");
    if (lo > hi) fail(open, "malformed interval: lower bound exceeds upper bound");
    return Interval{lo, hi};
  }

  std::vector<Token> toks_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text, const ParseOptions& options) {
  return Parser(lex(text), options).parse_all();
}

}  // namespace stlcp
