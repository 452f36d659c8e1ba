#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace invsynth {

struct SexprError : std::runtime_error {
  int line, col;
  SexprError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_),
        col(col_) {}
};

// Minimal s-expression: symbols, decimal numerals and lists. Comments run
// from ';' to end of line. Good enough for the problem dialects and for
// solver model output.
struct Sexpr {
  enum class Kind { Symbol, Number, List };
  Kind kind = Kind::List;
  std::string sym;
  long long num = 0;
  std::vector<Sexpr> items;
  int line = 0, col = 0;

  bool is_sym(const char* s) const { return kind == Kind::Symbol && sym == s; }
  bool is_list() const { return kind == Kind::List; }
  std::string to_string() const;
};

std::vector<Sexpr> parse_sexprs(const std::string& text);

}  // namespace invsynth
