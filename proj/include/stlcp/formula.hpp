#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace stlcp {

/// Discrete time index (sample number).
using Step = std::int64_t;

/// Closed integer interval [lo, hi]; hi may be `kInf`.
struct Interval {
  static constexpr Step kInf = std::numeric_limits<Step>::max();

  Step lo = 0;
  Step hi = 0;

  bool bounded() const noexcept { return hi != kInf; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Checks 0 <= lo <= hi; throws Error(InvalidArgument) otherwise.
Interval make_interval(Step lo, Step hi);

struct Term {
  double coef = 1.0;
  std::string var;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Symbolic predicate in h >= 0 form, bound to a predicate function once the
/// signal component names are known.
///   Linear: h(x) = sum(coef * x[var]) + offset
///   Norm2:  h(x) = sign * ||x[vars]||_2 + offset, sign in {+1, -1}
struct Atom {
  enum class Kind { Linear, Norm2 };

  Kind kind = Kind::Linear;
  std::vector<Term> terms;
  std::vector<std::string> vars;
  double sign = 1.0;
  double offset = 0.0;

  static Atom linear(std::vector<Term> terms, double offset);
  static Atom norm2(std::vector<std::string> vars, double sign, double offset);

  /// Atom with h' = -h.
  Atom negated() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class NodeKind {
  True,
  False,  // internal, produced by to_pnf(!True)
  Predicate,
  Not,
  And,
  Or,
  Until,
  Since,
  Eventually,
  Once,
  Always,
  Historically,
  Release,  // internal, dual of Until
  Trigger,  // internal, dual of Since
};

const char* node_kind_name(NodeKind kind) noexcept;
bool is_future(NodeKind kind) noexcept;
bool is_past(NodeKind kind) noexcept;
bool is_temporal(NodeKind kind) noexcept;

/// Immutable STL syntax tree. Copies share structure.
class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  static Formula predicate(Atom atom);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula until(Interval i, Formula lhs, Formula rhs);
  static Formula since(Interval i, Formula lhs, Formula rhs);
  static Formula release(Interval i, Formula lhs, Formula rhs);
  static Formula trigger(Interval i, Formula lhs, Formula rhs);
  static Formula eventually(Interval i, Formula f);
  static Formula once(Interval i, Formula f);
  static Formula always(Interval i, Formula f);
  static Formula historically(Interval i, Formula f);

  NodeKind kind() const noexcept;
  const Interval& interval() const noexcept;
  const Atom& atom() const;
  std::size_t arity() const noexcept;
  /// Child 0 is the left operand (or the only one), child 1 the right.
  const Formula& child(std::size_t index) const;

  /// Structural equality.
  friend bool operator==(const Formula& a, const Formula& b);

 struct Node;  // opaque

 private:
  explicit Formula(std::shared_ptr<const Node> node);

  std::shared_ptr<const Node> node_;
};

struct HorizonSpec {
  Step tau0 = 0;
  Step t = 0;
  Step length = 0;
  Step horizon = 0;

  /// H <= 0: the formula is decided by observations alone.
  bool needs_prediction() const noexcept { return horizon > 0; }
};

/// H = tau0 + L - t.
HorizonSpec horizon(Step tau0, Step t, Step length);

/// True when every future operator has a finite upper bound.
bool is_bounded(const Formula& f);

/// Formula length L: the number of steps past the enable time needed to decide
/// the formula. Throws Error(Unbounded) on an unbounded future operator.
Step formula_length(const Formula& f);

/// Replace every infinite upper bound by `bound` (clamped up to the lower bound).
Formula truncate_unbounded(const Formula& f, Step bound);

/// Positive normal form: negations absorbed into predicates.
Formula to_pnf(const Formula& f);

/// True when the formula contains no Not node.
bool is_pnf(const Formula& f);

std::size_t node_count(const Formula& f);

/// Canonical text; parse(render(f)) == f. Internal node kinds render with
/// keywords that parse only with ParseOptions::allow_internal.
std::string render(const Formula& f);

/// 16 hex digits, FNV-1a over render(f).
std::string formula_hash(const Formula& f);

/// Shortest decimal text that parses back to the same double ("inf"/"-inf"
/// for infinities).
std::string format_double(double value);

}  // namespace stlcp
