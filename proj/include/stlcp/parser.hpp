#pragma once

#include <string_view>

#include "stlcp/formula.hpp"

namespace stlcp {

struct ParseOptions {
  /// Accept `False`, `R[a,b]` and `T[a,b]`, which normally only appear in
  /// rewritten formulas.
  bool allow_internal = false;
};

/// Grammar (precedence high to low: `!`, temporal, `&&`, `||`):
///
///   formula  := or
///   or       := and ("||" and)*
///   and      := binary ("&&" binary)*
///   binary   := unary (("U" | "S") interval unary)*
///   unary    := "!" unary | ("G" | "F" | "O" | "H") interval unary | primary
///   primary  := "True" | "(" formula ")" | atom
///   atom     := linear cmp number | "norm2(" ident ("," ident)* ")" cmp number
///   linear   := ["-"] term (("+" | "-") term)*
///   term     := [number ["*"]] ident
///   interval := "[" int "," (int | "inf") "]"
///   cmp      := ">=" | "<=" | ">" | "<"
///
/// Operator letters are keywords only when followed by `[`.
Formula parse(std::string_view text, const ParseOptions& options = {});

}  // namespace stlcp
