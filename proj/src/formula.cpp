#include "stlcp/formula.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "stlcp/error.hpp"

namespace stlcp {

struct Formula::Node {
  NodeKind kind = NodeKind::True;
  Interval interval;
  Atom atom;
  std::vector<Formula> children;
};

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

namespace {

std::shared_ptr<Formula::Node> make_node(NodeKind kind) {
  auto n = std::make_shared<Formula::Node>();
  n->kind = kind;
  return n;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("predicate ") + what + " must be finite");
  }
}

}  // namespace

Interval make_interval(Step lo, Step hi) {
  if (lo < 0 || hi < 0) {
    throw Error(ErrorCode::InvalidArgument, "interval bounds must be non-negative");
  }
  if (lo > hi) {
    throw Error(ErrorCode::InvalidArgument,
                "interval lower bound " + std::to_string(lo) +
                    " exceeds upper bound");
  }
  return Interval{lo, hi};
}

Atom Atom::linear(std::vector<Term> terms, double offset) {
  if (terms.empty()) {
    throw Error(ErrorCode::InvalidArgument, "linear predicate needs at least one term");
  }
  for (const auto& term : terms) {
    require_finite(term.coef, "coefficient");
    if (term.var.empty()) {
      throw Error(ErrorCode::InvalidArgument, "predicate variable name is empty");
    }
  }
  require_finite(offset, "offset");
  Atom a;
  a.kind = Kind::Linear;
  a.terms = std::move(terms);
  a.offset = offset;
  return a;
}

Atom Atom::norm2(std::vector<std::string> vars, double sign, double offset) {
  if (vars.empty()) {
    throw Error(ErrorCode::InvalidArgument, "norm2 predicate needs at least one variable");
  }
  if (sign != 1.0 && sign != -1.0) {
    throw Error(ErrorCode::InvalidArgument, "norm2 predicate sign must be +1 or -1");
  }
  require_finite(offset, "offset");
  Atom a;
  a.kind = Kind::Norm2;
  a.vars = std::move(vars);
  a.sign = sign;
  a.offset = offset;
  return a;
}

Atom Atom::negated() const {
  Atom a = *this;
  for (auto& term : a.terms) term.coef = -term.coef;
  if (a.kind == Kind::Norm2) a.sign = -a.sign;
  a.offset = -a.offset;
  return a;
}

const char* node_kind_name(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::True: return "True";
    case NodeKind::False: return "False";
    case NodeKind::Predicate: return "Predicate";
    case NodeKind::Not: return "Not";
    case NodeKind::And: return "And";
    case NodeKind::Or: return "Or";
    case NodeKind::Until: return "Until";
    case NodeKind::Since: return "Since";
    case NodeKind::Eventually: return "Eventually";
    case NodeKind::Once: return "Once";
    case NodeKind::Always: return "Always";
    case NodeKind::Historically: return "Historically";
    case NodeKind::Release: return "Release";
    case NodeKind::Trigger: return "Trigger";
  }
  return "?";
}

bool is_future(NodeKind kind) noexcept {
  return kind == NodeKind::Until || kind == NodeKind::Eventually ||
         kind == NodeKind::Always || kind == NodeKind::Release;
}

bool is_past(NodeKind kind) noexcept {
  return kind == NodeKind::Since || kind == NodeKind::Once ||
         kind == NodeKind::Historically || kind == NodeKind::Trigger;
}

bool is_temporal(NodeKind kind) noexcept { return is_future(kind) || is_past(kind); }

Formula Formula::truth() {
  static const Formula t{make_node(NodeKind::True)};
  return t;
}

Formula Formula::falsity() {
  static const Formula f{make_node(NodeKind::False)};
  return f;
}

Formula Formula::predicate(Atom atom) {
  auto n = make_node(NodeKind::Predicate);
  n->atom = std::move(atom);
  return Formula{std::move(n)};
}

Formula Formula::negation(Formula f) {
  auto n = make_node(NodeKind::Not);
  n->children = {std::move(f)};
  return Formula{std::move(n)};
}

namespace {

Formula::Node binary_node(NodeKind kind, Interval i, Formula lhs, Formula rhs) {
  Formula::Node n;
  n.kind = kind;
  n.interval = i;
  n.children = {std::move(lhs), std::move(rhs)};
  return n;
}

Formula::Node unary_node(NodeKind kind, Interval i, Formula f) {
  Formula::Node n;
  n.kind = kind;
  n.interval = i;
  n.children = {std::move(f)};
  return n;
}

void check_interval(const Interval& i) { (void)make_interval(i.lo, i.hi); }

}  // namespace

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return Formula{std::make_shared<const Node>(
      binary_node(NodeKind::And, {}, std::move(lhs), std::move(rhs)))};
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return Formula{std::make_shared<const Node>(
      binary_node(NodeKind::Or, {}, std::move(lhs), std::move(rhs)))};
}

#define STLCP_BINARY_TEMPORAL(name, kind)                                    \
  Formula Formula::name(Interval i, Formula lhs, Formula rhs) {             \
    check_interval(i);                                                      \
    return Formula{std::make_shared<const Node>(                            \
        binary_node(NodeKind::kind, i, std::move(lhs), std::move(rhs)))};   \
  }
#define STLCP_UNARY_TEMPORAL(name, kind)                                     \
  Formula Formula::name(Interval i, Formula f) {                            \
    check_interval(i);                                                      \
    return Formula{                                                         \
        std::make_shared<const Node>(unary_node(NodeKind::kind, i, std::move(f)))}; \
  }

STLCP_BINARY_TEMPORAL(until, Until)
STLCP_BINARY_TEMPORAL(since, Since)
STLCP_BINARY_TEMPORAL(release, Release)
STLCP_BINARY_TEMPORAL(trigger, Trigger)
STLCP_UNARY_TEMPORAL(eventually, Eventually)
STLCP_UNARY_TEMPORAL(once, Once)
STLCP_UNARY_TEMPORAL(always, Always)
STLCP_UNARY_TEMPORAL(historically, Historically)

#undef STLCP_BINARY_TEMPORAL
#undef STLCP_UNARY_TEMPORAL

NodeKind Formula::kind() const noexcept { return node_->kind; }
const Interval& Formula::interval() const noexcept { return node_->interval; }
std::size_t Formula::arity() const noexcept { return node_->children.size(); }

const Atom& Formula::atom() const {
  if (node_->kind != NodeKind::Predicate) {
    throw Error(ErrorCode::InvalidArgument, "formula node is not a predicate");
  }
  return node_->atom;
}

const Formula& Formula::child(std::size_t index) const {
  if (index >= node_->children.size()) {
    throw Error(ErrorCode::InvalidArgument, "formula child index out of range");
  }
  return node_->children[index];
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.children.size() != y.children.size()) return false;
  if (is_temporal(x.kind) && !(x.interval == y.interval)) return false;
  if (x.kind == NodeKind::Predicate && !(x.atom == y.atom)) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!(x.children[i] == y.children[i])) return false;
  }
  return true;
}

HorizonSpec horizon(Step tau0, Step t, Step length) {
  if (tau0 < 0 || t < 0) {
    throw Error(ErrorCode::InvalidArgument, "tau0 and t must be non-negative");
  }
  if (length < 0) {
    throw Error(ErrorCode::InvalidArgument, "formula length must be non-negative");
  }
  return HorizonSpec{tau0, t, length, tau0 + length - t};
}

bool is_bounded(const Formula& f) {
  if (is_future(f.kind()) && !f.interval().bounded()) return false;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (!is_bounded(f.child(i))) return false;
  }
  return true;
}

Step formula_length(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::True:
    case NodeKind::False:
    case NodeKind::Predicate:
      return 0;
    case NodeKind::Not:
    case NodeKind::Once:
    case NodeKind::Historically:
      return formula_length(f.child(0));
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Since:
    case NodeKind::Trigger:
      return std::max(formula_length(f.child(0)), formula_length(f.child(1)));
    case NodeKind::Eventually:
    case NodeKind::Always:
    case NodeKind::Until:
    case NodeKind::Release: {
      if (!f.interval().bounded()) {
        throw Error(ErrorCode::Unbounded,
                    std::string(node_kind_name(f.kind())) +
                        " has an unbounded interval; truncate it first");
      }
      Step inner = formula_length(f.child(0));
      if (f.arity() == 2) inner = std::max(inner, formula_length(f.child(1)));
      return f.interval().hi + inner;
    }
  }
  throw Error(ErrorCode::Internal, "unhandled node kind");
}

namespace {

Formula rebuild(const Formula& f, std::vector<Formula> kids, NodeKind kind,
                Interval i) {
  switch (kind) {
    case NodeKind::Not: return Formula::negation(std::move(kids[0]));
    case NodeKind::And: return Formula::conjunction(std::move(kids[0]), std::move(kids[1]));
    case NodeKind::Or: return Formula::disjunction(std::move(kids[0]), std::move(kids[1]));
    case NodeKind::Until: return Formula::until(i, std::move(kids[0]), std::move(kids[1]));
    case NodeKind::Since: return Formula::since(i, std::move(kids[0]), std::move(kids[1]));
    case NodeKind::Release: return Formula::release(i, std::move(kids[0]), std::move(kids[1]));
    case NodeKind::Trigger: return Formula::trigger(i, std::move(kids[0]), std::move(kids[1]));
    case NodeKind::Eventually: return Formula::eventually(i, std::move(kids[0]));
    case NodeKind::Once: return Formula::once(i, std::move(kids[0]));
    case NodeKind::Always: return Formula::always(i, std::move(kids[0]));
    case NodeKind::Historically: return Formula::historically(i, std::move(kids[0]));
    default: return f;
  }
}

NodeKind dual(NodeKind kind) {
  switch (kind) {
    case NodeKind::True: return NodeKind::False;
    case NodeKind::False: return NodeKind::True;
    case NodeKind::And: return NodeKind::Or;
    case NodeKind::Or: return NodeKind::And;
    case NodeKind::Until: return NodeKind::Release;
    case NodeKind::Release: return NodeKind::Until;
    case NodeKind::Since: return NodeKind::Trigger;
    case NodeKind::Trigger: return NodeKind::Since;
    case NodeKind::Eventually: return NodeKind::Always;
    case NodeKind::Always: return NodeKind::Eventually;
    case NodeKind::Once: return NodeKind::Historically;
    case NodeKind::Historically: return NodeKind::Once;
    default: return kind;
  }
}

Formula pnf(const Formula& f, bool negate) {
  switch (f.kind()) {
    case NodeKind::True:
      return negate ? Formula::falsity() : f;
    case NodeKind::False:
      return negate ? Formula::truth() : f;
    case NodeKind::Predicate:
      return negate ? Formula::predicate(f.atom().negated()) : f;
    case NodeKind::Not:
      return pnf(f.child(0), !negate);
    default: {
      std::vector<Formula> kids;
      for (std::size_t i = 0; i < f.arity(); ++i) kids.push_back(pnf(f.child(i), negate));
      return rebuild(f, std::move(kids), negate ? dual(f.kind()) : f.kind(),
                     f.interval());
    }
  }
}

}  // namespace

Formula to_pnf(const Formula& f) { return pnf(f, false); }

bool is_pnf(const Formula& f) {
  if (f.kind() == NodeKind::Not) return false;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (!is_pnf(f.child(i))) return false;
  }
  return true;
}

std::size_t node_count(const Formula& f) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < f.arity(); ++i) n += node_count(f.child(i));
  return n;
}

Formula truncate_unbounded(const Formula& f, Step bound) {
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, "truncation bound must be non-negative");
  if (f.arity() == 0) return f;
  std::vector<Formula> kids;
  for (std::size_t i = 0; i < f.arity(); ++i) kids.push_back(truncate_unbounded(f.child(i), bound));
  Interval i = f.interval();
  if (is_temporal(f.kind()) && !i.bounded()) i.hi = std::max(bound, i.lo);
  return rebuild(f, std::move(kids), f.kind(), i);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string render_interval(const Interval& i) {
  std::string s = "[" + std::to_string(i.lo) + ",";
  s += i.bounded() ? std::to_string(i.hi) : std::string("inf");
  return s + "]";
}

std::string render_term(const Term& term, bool first) {
  std::string out;
  bool negative = std::signbit(term.coef);
  double mag = std::fabs(term.coef);
  if (first) {
    if (negative) out = "-";
  } else {
    out = negative ? " - " : " + ";
  }
  if (mag != 1.0) out += format_double(mag) + "*";
  return out + term.var;
}

std::string render_atom(const Atom& a) {
  if (a.kind == Atom::Kind::Norm2) {
    std::string s = "norm2(";
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
      if (i) s += ", ";
      s += a.vars[i];
    }
    s += ")";
    return a.sign > 0 ? s + " >= " + format_double(-a.offset)
                      : s + " <= " + format_double(a.offset);
  }
  if (a.terms.size() == 1 && a.terms[0].coef == 1.0) {
    return a.terms[0].var + " >= " + format_double(-a.offset);
  }
  if (a.terms.size() == 1 && a.terms[0].coef == -1.0) {
    return a.terms[0].var + " <= " + format_double(a.offset);
  }
  std::string s;
  for (std::size_t i = 0; i < a.terms.size(); ++i) s += render_term(a.terms[i], i == 0);
  return s + " >= " + format_double(-a.offset);
}

std::string wrap(const Formula& f) {
  if (f.kind() == NodeKind::True || f.kind() == NodeKind::False) return render(f);
  return "(" + render(f) + ")";
}

const char* operator_keyword(NodeKind kind) {
  switch (kind) {
    case NodeKind::Until: return "U";
    case NodeKind::Since: return "S";
    case NodeKind::Release: return "R";
    case NodeKind::Trigger: return "T";
    case NodeKind::Eventually: return "F";
    case NodeKind::Always: return "G";
    case NodeKind::Once: return "O";
    case NodeKind::Historically: return "H";
    default: return "?";
  }
}

}  // namespace

std::string render(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::True: return "True";
    case NodeKind::False: return "False";
    case NodeKind::Predicate: return render_atom(f.atom());
    case NodeKind::Not: return "!" + wrap(f.child(0));
    case NodeKind::And: return wrap(f.child(0)) + " && " + wrap(f.child(1));
    case NodeKind::Or: return wrap(f.child(0)) + " || " + wrap(f.child(1));
    case NodeKind::Until:
    case NodeKind::Since:
    case NodeKind::Release:
    case NodeKind::Trigger:
      return wrap(f.child(0)) + " " + operator_keyword(f.kind()) +
             render_interval(f.interval()) + " " + wrap(f.child(1));
    case NodeKind::Eventually:
    case NodeKind::Always:
    case NodeKind::Once:
    case NodeKind::Historically:
      return operator_keyword(f.kind()) + render_interval(f.interval()) + wrap(f.child(0));
  }
  return "?";
}

std::string formula_hash(const Formula& f) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render(f)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stlcp
