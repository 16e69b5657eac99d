#pragma once

#include <stdexcept>
#include <string>

#include "dynpol/ast.hpp"

namespace dynpol {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
};

// Parses a .dpol source text: a declaration header followed by commands
// separated by ';'. Throws ParseError on syntax errors, undeclared
// identifiers and duplicate declarations.
Program parse_program(const std::string& source);

Program parse_program_file(const std::string& path);

}  // namespace dynpol
