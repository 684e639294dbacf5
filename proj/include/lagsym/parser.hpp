#ifndef LAGSYM_PARSER_HPP
#define LAGSYM_PARSER_HPP

#include "lagsym/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace lagsym {

// Contiguous 1-based inclusive index range within 1..D.
struct Slice {
    int lo = 0;
    int hi = 0;
    int size() const { return hi - lo + 1; }
};

// Per-coordinate sampling interval.  `shell` marks a two-sided interval
// ±[lo, hi] (declared with 0 < lo < hi), used to keep samples away from the
// origin on both sides.
struct BoxInterval {
    Real lo = -1.0;
    Real hi = 1.0;
    bool shell = false;
};

struct SystemSpec {
    int dim = 0;
    std::map<std::string, Real> params;
    std::map<std::string, Slice> slices;
    Expr lagrangian;
    std::vector<Expr> guards;
    std::vector<BoxInterval> q_box;
    std::vector<BoxInterval> v_box;
    std::string source;
};

// Parse a full system spec.  Grammar (comments start with '#'):
//   spec   := header* "L" "=" expr ";"?
//   header := "dim" INT ";" | "param" NAME "=" NUMBER ";"
//           | "slice" NAME "=" "q" "[" INT ".." INT "]" ";"
//           | "guard" expr ";" | "box" NAME NUMBER NUMBER ";"
// Vector arguments of dot/norm are q, v, a slice name, or q[NAME]/v[NAME]
// with NAME a slice; dot and norm are expanded into scalar arithmetic during
// parsing, so downstream passes only see the scalar grammar.
SystemSpec parse_spec(const std::string& text);

// Parse a single expression in the context of an existing spec (params and
// slices visible).  Used by tests for round-trip checks.
Expr parse_expr_in(const SystemSpec& spec, const std::string& text);

} // namespace lagsym

#endif
