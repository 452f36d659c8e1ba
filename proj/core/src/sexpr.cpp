#include "invsynth/sexpr.hpp"

#include <cctype>

namespace invsynth {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char next() {
    char c = text[pos++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }
  void skip_ws() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') next();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        next();
      } else {
        break;
      }
    }
  }
};

bool atom_char(char c) {
  if (std::isspace(static_cast<unsigned char>(c))) return false;
  return c != '(' && c != ')' && c != ';';
}

Sexpr parse_one(Cursor& cur) {
  cur.skip_ws();
  if (cur.done()) throw SexprError("unexpected end of input", cur.line, cur.col);
  Sexpr e;
  e.line = cur.line;
  e.col = cur.col;
  char c = cur.peek();
  if (c == '(') {
    cur.next();
    e.kind = Sexpr::Kind::List;
    while (true) {
      cur.skip_ws();
      if (cur.done()) throw SexprError("missing ')'", e.line, e.col);
      if (cur.peek() == ')') {
        cur.next();
        break;
      }
      e.items.push_back(parse_one(cur));
    }
    return e;
  }
  if (c == ')') throw SexprError("unexpected ')'", cur.line, cur.col);
  std::string tok;
  while (!cur.done() && atom_char(cur.peek())) tok += cur.next();
  if (tok.empty()) throw SexprError("empty token", cur.line, cur.col);
  bool numeric = std::isdigit(static_cast<unsigned char>(tok[0])) ||
                 (tok[0] == '-' && tok.size() > 1 &&
                  std::isdigit(static_cast<unsigned char>(tok[1])));
  if (numeric) {
    try {
      e.kind = Sexpr::Kind::Number;
      e.num = std::stoll(tok);
      return e;
    } catch (const std::exception&) {
      throw SexprError("numeral out of range: " + tok, e.line, e.col);
    }
  }
  e.kind = Sexpr::Kind::Symbol;
  e.sym = tok;
  return e;
}

}  // namespace

std::vector<Sexpr> parse_sexprs(const std::string& text) {
  Cursor cur{text};
  std::vector<Sexpr> out;
  while (true) {
    cur.skip_ws();
    if (cur.done()) break;
    out.push_back(parse_one(cur));
  }
  return out;
}

std::string Sexpr::to_string() const {
  switch (kind) {
    case Kind::Symbol: return sym;
    case Kind::Number: return std::to_string(num);
    case Kind::List: {
      std::string s = "(";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ' ';
        s += items[i].to_string();
      }
      return s + ")";
    }
  }
  return "";
}

}  // namespace invsynth
