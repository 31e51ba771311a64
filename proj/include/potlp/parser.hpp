#pragma once

#include <cctype>
#include <string>

#include "potlp/errors.hpp"
#include "potlp/formula.hpp"

namespace potlp {

struct parse_options {
  bool allow_literals = true; // accept the keywords true / false
};

/* Recursive-descent parser for task expressions.
 *
 *   expr    := or
 *   or      := and ('|' and)*
 *   and     := until ('&' until)*
 *   until   := unary ('U' until)?          right-associative
 *   unary   := '!' ident | 'X' unary | 'F' unary | '(' expr ')' | ident
 *
 * '!' may only be applied to a proposition. Identifiers must belong to
 * the supplied alphabet.
 */
class spec_parser {
public:
  spec_parser(const std::string& text, const alphabet& sigma, parse_options opts)
      : text_(text), sigma_(sigma), opts_(opts) {}

  formula parse() {
    formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail_here("unexpected trailing input");
    return f;
  }

private:
  formula parse_or() {
    formula f = parse_and();
    while (peek() == '|') {
      ++pos_;
      f = formula::disj(f, parse_and());
    }
    return f;
  }

  formula parse_and() {
    formula f = parse_until();
    while (peek() == '&') {
      ++pos_;
      f = formula::conj(f, parse_until());
    }
    return f;
  }

  formula parse_until() {
    formula f = parse_unary();
    skip_ws();
    if (at_keyword("U")) {
      pos_ += 1;
      return formula::until(f, parse_until());
    }
    return f;
  }

  formula parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) fail_here("unexpected end of input");
    char c = text_[pos_];
    if (c == '!') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(')
        fail(errc::negation_on_compound,
             "negation only applies to a proposition (at offset " + std::to_string(pos_) + ")");
      std::string name = read_ident();
      if (name.empty() || name == "true" || name == "false" || is_operator_word(name))
        fail(errc::negation_on_compound,
             "negation only applies to a proposition (at offset " + std::to_string(pos_) + ")");
      return formula::neg_atom(prop_index(name));
    }
    if (c == '(') {
      ++pos_;
      formula f = parse_or();
      skip_ws();
      if (peek() != ')') fail_here("expected ')'");
      ++pos_;
      return f;
    }
    if (at_keyword("X")) {
      ++pos_;
      return formula::next(parse_unary());
    }
    if (at_keyword("F")) {
      ++pos_;
      return formula::eventually(parse_unary());
    }
    std::string name = read_ident();
    if (name.empty()) fail_here("expected a proposition");
    if (name == "true" || name == "false") {
      if (!opts_.allow_literals) fail_here("boolean literals disabled");
      return name == "true" ? formula::truth() : formula::falsity();
    }
    if (is_operator_word(name)) fail_here("misplaced operator '" + name + "'");
    return formula::atom(prop_index(name));
  }

  int prop_index(const std::string& name) {
    int idx = sigma_.index_of(name);
    if (idx < 0) fail(errc::unknown_proposition, "unknown proposition: " + name);
    return idx;
  }

  static bool is_operator_word(const std::string& s) { return s == "U" || s == "X" || s == "F"; }

  // single capital operator letter followed by a non-identifier character
  bool at_keyword(const char* kw) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != kw[0]) return false;
    size_t after = pos_ + 1;
    if (after < text_.size() && is_ident_char(text_[after])) return false;
    return true;
  }

  std::string read_ident() {
    skip_ws();
    size_t begin = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return text_.substr(begin, pos_ - begin);
  }

  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail_here(const std::string& msg) {
    fail(errc::syntax, msg + " (at offset " + std::to_string(pos_) + ")");
  }

  const std::string& text_;
  const alphabet& sigma_;
  parse_options opts_;
  size_t pos_ = 0;
};

inline formula parse_spec(const std::string& text, const alphabet& sigma, parse_options opts = {}) {
  return spec_parser(text, sigma, opts).parse();
}

} // namespace potlp
