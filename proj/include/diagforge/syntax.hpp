#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "diagforge/ast.hpp"

namespace diagforge {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t position, std::string expected);

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

/// Parses DL concrete syntax. A program is either a bare body (input shape
/// `any`) or `(program <shape> <body>)`. `;` starts a comment to end of line.
Program parse(std::string_view text);

/// Canonical text: single spaces, lowercase keywords, no comments.
std::string serialize(const Program& p);
std::string serialize(const Node& n);
std::string serialize(const Shape& s);

Shape parse_shape(std::string_view text);

}  // namespace diagforge
