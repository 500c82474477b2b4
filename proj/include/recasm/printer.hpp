#pragma once

#include <string>

#include "recasm/ast.hpp"

namespace recasm {

std::string print_term(const Term& t);
std::string print_rule(const Rule& r, int indent = 0);
/// Canonical source text; parse(pretty_print(p)) is AST-equal to p.
std::string pretty_print(const Program& p);

}  // namespace recasm
