#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlcp/formula.hpp"

namespace stlcp {

/// Finite discrete-time signal of n-dimensional real states, row-major.
class Signal {
 public:
  Signal() = default;
  Signal(std::size_t dim, std::vector<double> values);
  static Signal from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t length() const noexcept { return dim_ ? values_.size() / dim_ : 0; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> at(std::size_t step) const;
  std::span<const double> values() const noexcept { return values_; }

  /// First `n` states.
  Signal prefix(std::size_t n) const;
  void append(std::span<const double> state);

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

enum class Norm { L2, Linf };

const char* norm_name(Norm norm) noexcept;
Norm parse_norm(std::string_view name);
double norm_of(std::span<const double> v, Norm norm);

/// Predicate function h. Affine functions get an exact ball infimum; generic
/// ones carry a Lipschitz constant valid for one declared norm.
class PredicateFn {
 public:
  using Function = std::function<double(std::span<const double>)>;

  static PredicateFn affine(std::vector<double> a, double b);
  static PredicateFn generic(Function h, double lipschitz, Norm norm, std::size_t dim);

  bool is_affine() const noexcept { return affine_; }
  std::size_t dim() const noexcept { return dim_; }
  double lipschitz() const noexcept { return lipschitz_; }
  Norm declared_norm() const noexcept { return norm_; }
  const std::vector<double>& coefficients() const noexcept { return a_; }
  double intercept() const noexcept { return b_; }

  double operator()(std::span<const double> state) const;
  PredicateFn negated() const;

 private:
  bool affine_ = true;
  std::size_t dim_ = 0;
  std::vector<double> a_;
  double b_ = 0.0;
  Function h_;
  double lipschitz_ = 0.0;
  Norm norm_ = Norm::L2;
};

/// inf over {z : ||z - center|| <= radius} of h(z). Exact for affine h
/// (dual norm), the Lipschitz lower bound h(center) - L*radius otherwise.
double inf_ball(const PredicateFn& h, std::span<const double> center, double radius,
                Norm norm);

/// Names of the signal components, in column order.
struct Schema {
  std::vector<std::string> names;

  std::size_t dim() const noexcept { return names.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  static Schema numbered(std::size_t dim);  // x1..xn

  friend bool operator==(const Schema&, const Schema&) = default;
};

PredicateFn bind_atom(const Atom& atom, const Schema& schema);

/// Prediction balls around a predicted trajectory. `center` covers
/// 0..t+H with observed states at indices <= t; `radii[i]` is the radius
/// at step t+1+i.
struct BallFamily {
  Signal center;
  Step t = 0;
  std::vector<double> radii;
  Norm norm = Norm::L2;

  double radius_at(Step tau) const;
};

/// Formula with predicates bound to a schema, flattened for evaluation.
class BoundFormula {
 public:
  BoundFormula(const Formula& f, const Schema& schema);

  struct Node {
    NodeKind kind;
    Interval interval;
    int lhs = -1;
    int rhs = -1;
    int predicate = -1;
    Step length = 0;  // steps of future needed past this node's time
  };

  const Formula& formula() const noexcept { return formula_; }
  const Schema& schema() const noexcept { return schema_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }  // children first
  const std::vector<PredicateFn>& predicates() const noexcept { return predicates_; }
  const std::vector<std::string>& predicate_labels() const noexcept { return labels_; }
  Step length() const noexcept { return nodes_.back().length; }
  std::size_t dim() const noexcept { return schema_.dim(); }

 private:
  int add(const Formula& f);

  Formula formula_;
  Schema schema_;
  std::vector<Node> nodes_;
  std::vector<PredicateFn> predicates_;
  std::vector<std::string> labels_;
};

bool eval_bool(const BoundFormula& f, const Signal& x, Step tau);
double eval_robust(const BoundFormula& f, const Signal& x, Step tau);

/// Worst-case robustness over prediction balls; requires a PNF formula.
double eval_worst_case(const BoundFormula& f, const BallFamily& balls, Step tau);

struct PredicateDiagnostic {
  std::string label;
  Step first = 0;  // time support [first, last] of the predicate
  Step last = 0;
  double min_value = 0.0;  // min of worst-case value over that support
};

/// Per-predicate worst-case values over each predicate's time support.
std::vector<PredicateDiagnostic> worst_case_diagnostics(const BoundFormula& f,
                                                        const BallFamily& balls, Step tau);

}  // namespace stlcp
