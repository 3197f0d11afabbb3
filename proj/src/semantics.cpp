#include "stlcp/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stlcp/error.hpp"

namespace stlcp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Signal::Signal(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "signal dimension must be >= 1");
  if (values_.size() % dim_ != 0) {
    throw Error(ErrorCode::DimensionMismatch, "signal values are not a whole number of states");
  }
}

Signal Signal::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "signal needs at least one state");
  std::size_t dim = rows.front().size();
  std::vector<double> values;
  values.reserve(dim * rows.size());
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Signal(dim, std::move(values));
}

std::span<const double> Signal::at(std::size_t step) const {
  if (step >= length()) {
    throw Error(ErrorCode::SignalTooShort,
                "step " + std::to_string(step) + " beyond signal of length " +
                    std::to_string(length()));
  }
  return std::span<const double>(values_).subspan(step * dim_, dim_);
}

Signal Signal::prefix(std::size_t n) const {
  if (n > length()) {
    throw Error(ErrorCode::SignalTooShort, "prefix of " + std::to_string(n) +
                                               " states from signal of length " +
                                               std::to_string(length()));
  }
  Signal s;
  s.dim_ = dim_;
  s.values_.assign(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n * dim_));
  return s;
}

void Signal::append(std::span<const double> state) {
  if (dim_ == 0) dim_ = state.size();
  if (state.size() != dim_ || dim_ == 0) {
    throw Error(ErrorCode::DimensionMismatch, "appended state has wrong dimension");
  }
  values_.insert(values_.end(), state.begin(), state.end());
}

const char* norm_name(Norm norm) noexcept { return norm == Norm::L2 ? "L2" : "Linf"; }

Norm parse_norm(std::string_view name) {
  if (name == "L2" || name == "l2") return Norm::L2;
  if (name == "Linf" || name == "linf" || name == "LINF") return Norm::Linf;
  throw Error(ErrorCode::InvalidArgument, "unknown norm '" + std::string(name) + "'");
}

double norm_of(std::span<const double> v, Norm norm) {
  double acc = 0.0;
  if (norm == Norm::L2) {
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
  }
  for (double x : v) acc = std::max(acc, std::fabs(x));
  return acc;
}

PredicateFn PredicateFn::affine(std::vector<double> a, double b) {
  if (a.empty()) throw Error(ErrorCode::InvalidArgument, "affine predicate needs coefficients");
  PredicateFn p;
  p.affine_ = true;
  p.dim_ = a.size();
  p.a_ = std::move(a);
  p.b_ = b;
  return p;
}

PredicateFn PredicateFn::generic(Function h, double lipschitz, Norm norm, std::size_t dim) {
  if (!h) throw Error(ErrorCode::InvalidArgument, "generic predicate needs a function");
  if (!(lipschitz >= 0.0) || std::isinf(lipschitz)) {
    throw Error(ErrorCode::InvalidArgument, "Lipschitz constant must be finite and >= 0");
  }
  PredicateFn p;
  p.affine_ = false;
  p.dim_ = dim;
  p.h_ = std::move(h);
  p.lipschitz_ = lipschitz;
  p.norm_ = norm;
  return p;
}

double PredicateFn::operator()(std::span<const double> state) const {
  if (state.size() != dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "predicate expects dimension " + std::to_string(dim_) + ", state has " +
                    std::to_string(state.size()));
  }
  if (!affine_) return h_(state);
  double v = b_;
  for (std::size_t i = 0; i < dim_; ++i) v += a_[i] * state[i];
  return v;
}

PredicateFn PredicateFn::negated() const {
  PredicateFn p = *this;
  if (affine_) {
    for (double& c : p.a_) c = -c;
    p.b_ = -p.b_;
  } else {
    p.h_ = [h = h_](std::span<const double> s) { return -h(s); };
  }
  return p;
}

double inf_ball(const PredicateFn& h, std::span<const double> center, double radius, Norm norm) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be >= 0");
  double at_center = h(center);
  double scale = 0.0;
  if (h.is_affine()) {
    // support function of the ball: dual norm of the gradient (L2 <-> L2, Linf <-> L1)
    if (norm == Norm::L2) {
      scale = norm_of(h.coefficients(), Norm::L2);
    } else {
      for (double c : h.coefficients()) scale += std::fabs(c);
    }
  } else {
    if (h.declared_norm() != norm) {
      throw Error(ErrorCode::NormMismatch,
                  std::string("predicate Lipschitz constant is declared for ") +
                      norm_name(h.declared_norm()) + ", ball uses " + norm_name(norm));
    }
    scale = h.lipschitz();
  }
  if (std::isinf(radius)) return scale == 0.0 ? at_center : -kInf;
  return at_center - scale * radius;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

Schema Schema::numbered(std::size_t dim) {
  Schema s;
  for (std::size_t i = 0; i < dim; ++i) s.names.push_back("x" + std::to_string(i + 1));
  return s;
}

PredicateFn bind_atom(const Atom& atom, const Schema& schema) {
  auto lookup = [&](const std::string& name) {
    auto idx = schema.index_of(name);
    if (!idx) {
      throw Error(ErrorCode::InvalidArgument, "unknown signal component '" + name + "'");
    }
    return *idx;
  };
  if (atom.kind == Atom::Kind::Linear) {
    std::vector<double> a(schema.dim(), 0.0);
    for (const auto& term : atom.terms) a[lookup(term.var)] += term.coef;
    return PredicateFn::affine(std::move(a), atom.offset);
  }
  std::vector<std::size_t> idx;
  for (const auto& v : atom.vars) idx.push_back(lookup(v));
  auto fn = [idx, sign = atom.sign, offset = atom.offset](std::span<const double> s) {
    double acc = 0.0;
    for (auto i : idx) acc += s[i] * s[i];
    return sign * std::sqrt(acc) + offset;
  };
  // |norm(u) - norm(v)| <= norm(u - v) restricted to a coordinate subset
  return PredicateFn::generic(fn, 1.0, Norm::L2, schema.dim());
}

double BallFamily::radius_at(Step tau) const {
  if (tau <= t) return 0.0;
  auto idx = static_cast<std::size_t>(tau - t - 1);
  if (idx >= radii.size()) {
    throw Error(ErrorCode::HorizonExceeded,
                "no prediction region for step " + std::to_string(tau));
  }
  return radii[idx];
}

BoundFormula::BoundFormula(const Formula& f, const Schema& schema)
    : formula_(f), schema_(schema) {
  if (schema_.dim() == 0) throw Error(ErrorCode::InvalidArgument, "schema has no components");
  add(f);
}

int BoundFormula::add(const Formula& f) {
  Node n{f.kind(), f.interval()};
  if (f.kind() == NodeKind::Predicate) {
    n.predicate = static_cast<int>(predicates_.size());
    predicates_.push_back(bind_atom(f.atom(), schema_));
    labels_.push_back(render(f));
  }
  if (f.arity() >= 1) n.lhs = add(f.child(0));
  if (f.arity() == 2) n.rhs = add(f.child(1));
  Step inner = 0;
  if (n.lhs >= 0) inner = nodes_[static_cast<std::size_t>(n.lhs)].length;
  if (n.rhs >= 0) inner = std::max(inner, nodes_[static_cast<std::size_t>(n.rhs)].length);
  n.length = inner;
  if (is_future(n.kind)) {
    if (!n.interval.bounded()) {
      throw Error(ErrorCode::Unbounded, std::string(node_kind_name(n.kind)) +
                                            " has an unbounded interval; truncate it first");
    }
    n.length = inner + n.interval.hi;
  }
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size() - 1);
}

namespace {

struct RobustAlgebra {
  using Value = double;
  static Value top() { return kInf; }
  static Value bottom() { return -kInf; }
  static Value meet(Value a, Value b) { return std::min(a, b); }
  static Value join(Value a, Value b) { return std::max(a, b); }
  static Value negate(Value a) { return -a; }
};

struct BoolAlgebra {
  using Value = char;
  static Value top() { return 1; }
  static Value bottom() { return 0; }
  static Value meet(Value a, Value b) { return static_cast<Value>(a && b); }
  static Value join(Value a, Value b) { return static_cast<Value>(a || b); }
  static Value negate(Value a) { return static_cast<Value>(!a); }
};

// Bottom-up evaluation: table[i][tau] holds node i's value for every tau at
// which the node is decidable on a signal of `length` samples.
template <class A, class Leaf>
typename A::Value evaluate(const BoundFormula& f, std::size_t length, Step tau, Leaf&& leaf) {
  using V = typename A::Value;
  const auto& nodes = f.nodes();
  const auto n_len = static_cast<Step>(length);
  if (tau < 0) throw Error(ErrorCode::InvalidArgument, "evaluation time must be >= 0");
  if (tau + f.length() >= n_len) {
    throw Error(ErrorCode::SignalTooShort,
                "formula of length " + std::to_string(f.length()) + " at time " +
                    std::to_string(tau) + " needs " + std::to_string(tau + f.length() + 1) +
                    " samples, signal has " + std::to_string(length));
  }
  // Only times <= tau + (root length - node length) are ever needed.
  std::vector<std::vector<V>> table(nodes.size());
  const Step root_len = f.length();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    const Step count = std::min(n_len - node.length, tau + root_len - node.length + 1);
    auto& out = table[i];
    out.assign(static_cast<std::size_t>(std::max<Step>(count, 0)), A::bottom());
    const auto* lhs = node.lhs >= 0 ? &table[static_cast<std::size_t>(node.lhs)] : nullptr;
    const auto* rhs = node.rhs >= 0 ? &table[static_cast<std::size_t>(node.rhs)] : nullptr;
    const Step lo = node.interval.lo;
    const Step hi = node.interval.hi;
    for (Step s = 0; s < count; ++s) {
      V v{};
      switch (node.kind) {
        case NodeKind::True: v = A::top(); break;
        case NodeKind::False: v = A::bottom(); break;
        case NodeKind::Predicate: v = leaf(node.predicate, s); break;
        case NodeKind::Not: v = A::negate((*lhs)[s]); break;
        case NodeKind::And: v = A::meet((*lhs)[s], (*rhs)[s]); break;
        case NodeKind::Or: v = A::join((*lhs)[s], (*rhs)[s]); break;
        case NodeKind::Eventually:
        case NodeKind::Always: {
          const bool ev = node.kind == NodeKind::Eventually;
          v = ev ? A::bottom() : A::top();
          for (Step u = s + lo; u <= s + hi; ++u) {
            v = ev ? A::join(v, (*lhs)[u]) : A::meet(v, (*lhs)[u]);
          }
          break;
        }
        case NodeKind::Once:
        case NodeKind::Historically: {
          const bool once = node.kind == NodeKind::Once;
          v = once ? A::bottom() : A::top();
          const Step first = hi >= s ? 0 : s - hi;
          for (Step u = first; u <= s - lo; ++u) {
            v = once ? A::join(v, (*lhs)[u]) : A::meet(v, (*lhs)[u]);
          }
          break;
        }
        case NodeKind::Until:
        case NodeKind::Release: {
          // until: sup_{u in s+I} min(rhs(u), inf_{s<w<u} lhs(w)); release is the dual
          const bool until = node.kind == NodeKind::Until;
          v = until ? A::bottom() : A::top();
          V inner = until ? A::top() : A::bottom();
          for (Step u = s; u <= s + hi; ++u) {
            if (u >= s + lo) {
              v = until ? A::join(v, A::meet((*rhs)[u], inner))
                        : A::meet(v, A::join((*rhs)[u], inner));
            }
            if (u > s && u < s + hi) {
              inner = until ? A::meet(inner, (*lhs)[u]) : A::join(inner, (*lhs)[u]);
            }
          }
          break;
        }
        case NodeKind::Since:
        case NodeKind::Trigger: {
          const bool since = node.kind == NodeKind::Since;
          v = since ? A::bottom() : A::top();
          V inner = since ? A::top() : A::bottom();
          const Step first = hi >= s ? 0 : s - hi;
          for (Step u = s; u >= first; --u) {
            if (u <= s - lo) {
              v = since ? A::join(v, A::meet((*rhs)[u], inner))
                        : A::meet(v, A::join((*rhs)[u], inner));
            }
            if (u < s) {
              inner = since ? A::meet(inner, (*lhs)[u]) : A::join(inner, (*lhs)[u]);
            }
          }
          break;
        }
      }
      out[static_cast<std::size_t>(s)] = v;
    }
  }
  return table.back()[static_cast<std::size_t>(tau)];
}

void check_dim(const BoundFormula& f, const Signal& x) {
  if (x.dim() != f.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "formula schema has " + std::to_string(f.dim()) + " components, signal has " +
                    std::to_string(x.dim()));
  }
}

double worst_case_leaf(const BoundFormula& f, const BallFamily& balls, int pred, Step s) {
  const auto& h = f.predicates()[static_cast<std::size_t>(pred)];
  auto state = balls.center.at(static_cast<std::size_t>(s));
  if (s <= balls.t) return h(state);
  return inf_ball(h, state, balls.radius_at(s), balls.norm);
}

void check_balls(const BoundFormula& f, const BallFamily& balls) {
  if (!is_pnf(f.formula())) {
    throw Error(ErrorCode::NotPnf, "worst-case semantics needs a formula in positive normal form");
  }
  check_dim(f, balls.center);
  if (balls.t < 0) throw Error(ErrorCode::InvalidArgument, "ball family t must be >= 0");
}

}  // namespace

bool eval_bool(const BoundFormula& f, const Signal& x, Step tau) {
  check_dim(f, x);
  return evaluate<BoolAlgebra>(f, x.length(), tau, [&](int pred, Step s) {
           return static_cast<char>(
               f.predicates()[static_cast<std::size_t>(pred)](x.at(static_cast<std::size_t>(s))) >=
               0.0);
         }) != 0;
}

double eval_robust(const BoundFormula& f, const Signal& x, Step tau) {
  check_dim(f, x);
  return evaluate<RobustAlgebra>(f, x.length(), tau, [&](int pred, Step s) {
    return f.predicates()[static_cast<std::size_t>(pred)](x.at(static_cast<std::size_t>(s)));
  });
}

double eval_worst_case(const BoundFormula& f, const BallFamily& balls, Step tau) {
  check_balls(f, balls);
  return evaluate<RobustAlgebra>(f, balls.center.length(), tau, [&](int pred, Step s) {
    return worst_case_leaf(f, balls, pred, s);
  });
}

std::vector<PredicateDiagnostic> worst_case_diagnostics(const BoundFormula& f,
                                                        const BallFamily& balls, Step tau) {
  check_balls(f, balls);
  const auto& nodes = f.nodes();
  const Step last_valid = static_cast<Step>(balls.center.length()) - 1;
  if (tau < 0 || tau + f.length() > last_valid) {
    throw Error(ErrorCode::SignalTooShort, "prediction does not cover the formula at this time");
  }
  struct Window {
    Step first = 1;
    Step last = 0;
  };
  std::vector<Window> win(nodes.size());
  win.back() = {tau, tau};
  auto widen = [&](int idx, Step first, Step last) {
    if (idx < 0 || first > last) return;
    auto& w = win[static_cast<std::size_t>(idx)];
    if (w.first > w.last) {
      w = {first, last};
    } else {
      w.first = std::min(w.first, first);
      w.last = std::max(w.last, last);
    }
  };
  auto sat_sub = [](Step a, Step b) { return b == Interval::kInf || b >= a ? Step{0} : a - b; };
  for (std::size_t k = nodes.size(); k-- > 0;) {
    const auto& n = nodes[k];
    const Window w = win[k];
    if (w.first > w.last) continue;
    const Step lo = n.interval.lo;
    const Step hi = n.interval.hi;
    switch (n.kind) {
      case NodeKind::Not:
      case NodeKind::And:
      case NodeKind::Or:
        widen(n.lhs, w.first, w.last);
        widen(n.rhs, w.first, w.last);
        break;
      case NodeKind::Eventually:
      case NodeKind::Always:
        widen(n.lhs, w.first + lo, w.last + hi);
        break;
      case NodeKind::Until:
      case NodeKind::Release:
        widen(n.rhs, w.first + lo, w.last + hi);
        widen(n.lhs, w.first + 1, w.last + hi - 1);
        break;
      case NodeKind::Once:
      case NodeKind::Historically:
        if (w.last >= lo) widen(n.lhs, sat_sub(w.first, hi), w.last - lo);
        break;
      case NodeKind::Since:
      case NodeKind::Trigger:
        if (w.last >= lo) widen(n.rhs, sat_sub(w.first, hi), w.last - lo);
        widen(n.lhs, sat_sub(w.first, hi) + 1, w.last - 1);
        break;
      default:
        break;
    }
  }
  std::map<std::string, PredicateDiagnostic> merged;
  std::vector<std::string> order;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    if (n.kind != NodeKind::Predicate || win[k].first > win[k].last) continue;
    double lowest = kInf;
    for (Step s = win[k].first; s <= win[k].last; ++s) {
      lowest = std::min(lowest, worst_case_leaf(f, balls, n.predicate, s));
    }
    const auto& label = f.predicate_labels()[static_cast<std::size_t>(n.predicate)];
    auto it = merged.find(label);
    if (it == merged.end()) {
      merged.emplace(label, PredicateDiagnostic{label, win[k].first, win[k].last, lowest});
      order.push_back(label);
    } else {
      it->second.first = std::min(it->second.first, win[k].first);
      it->second.last = std::max(it->second.last, win[k].last);
      it->second.min_value = std::min(it->second.min_value, lowest);
    }
  }
  std::vector<PredicateDiagnostic> out;
  for (const auto& label : order) out.push_back(merged.at(label));
  return out;
}

}  // namespace stlcp
