#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "recasm/ast.hpp"

namespace recasm {

struct ParseError {
  int line = 0;
  int col = 0;
  std::string message;
};

/// Thrown by parse() with at least one error.
class ParseFailure : public std::runtime_error {
 public:
  explicit ParseFailure(std::vector<ParseError> errors);
  const std::vector<ParseError>& errors() const { return errors_; }
  /// One `file:line:col: message` line per error.
  std::string format(const std::string& file) const;

 private:
  std::vector<ParseError> errors_;
};

Program parse(std::string_view source);
Program parse_file(const std::string& path);

/// Derives the signature and runs the static checks. Called by parse(); also
/// used on programs assembled in memory by the transforms.
void check_program(Program& program);

}  // namespace recasm
