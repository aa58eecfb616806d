#pragma once

#include <string_view>

#include "qiline/map_expr.hpp"

namespace qiline {

/// Parses the map DSL:
///
///   map  := term ("*" term)*            left factor applied last
///   term := "id" | "A(" t ")" | "B(" i "," s ")" | "a(" t ")" | "b(" i "," s ")"
///         | "logshift(" s ")" | "affine(" a "," b ")" | "h" | "refl"
///         | "pl[" (x ":" y ";")+ "slopes(" l "," r ")" "]"
///         | "lift[" (x ":" y ";")+ "]"
///         | "inv(" map ")" | "ext(" map "," at ")"
///         | "diag[" (lo "," hi ";")+ "](" map ")"
///
/// Numbers are decimals (optional sign and exponent) or rationals "p/q".
/// Throws ParseError carrying the byte offset of the problem; invariant
/// violations (A(0), B(0.5,1), ...) are reported the same way.
MapExpr parse_map(std::string_view src);

/// Exact value of a DSL number.
Rational parse_number(std::string_view text);

}  // namespace qiline
