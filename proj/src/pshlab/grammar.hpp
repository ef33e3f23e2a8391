#pragma once

#include <string>

#include "pshlab/expr.hpp"
#include "pshlab/geometry.hpp"

namespace pshlab {

// Plain-text prefix grammar for expressions and domains, e.g.
//   compose(neglogneg(2) logabs(poly 1 0))
//   sum(1 logabs(poly 1 -1) 0.5 const(1 -3))
//   ball(0 0 1)   polydisk(0 0 0 0 1 1)   cusp(2)   shrunk(ball(0 0 1) 0.1)
// Commas are treated as whitespace. parse(print(e)) reproduces e exactly.
PshExpr parse_expr(const std::string& text);
Domain parse_domain(const std::string& text);

std::string print_expr(const PshExpr& e);  // canonical form

}  // namespace pshlab
