#pragma once

#include <string>

#include "dynpol/ast.hpp"

namespace dynpol {

std::string print_expr(const Expr& e);
std::string print_command(const Command& c, int indent = 0);
std::string print_program(const Program& p);

// Structural equality via the canonical printed form.
bool same_expr(const Expr& a, const Expr& b);
bool same_command(const Command& a, const Command& b);
bool same_program(const Program& a, const Program& b);

}  // namespace dynpol
