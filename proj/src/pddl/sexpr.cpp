#include "sexpr.hpp"

#include <cctype>

#include "plancomm/error.hpp"

namespace plancomm::pddl::detail {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<SExpr> parse_all() {
    std::vector<SExpr> out;
    skip_blank();
    while (pos_ < text_.size()) {
      out.push_back(parse_one());
      skip_blank();
    }
    return out;
  }

 private:
  SExpr parse_one() {
    SExpr node;
    node.line = line_;
    node.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      node.is_list = true;
      advance();
      skip_blank();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        node.items.push_back(parse_one());
        skip_blank();
      }
      if (pos_ >= text_.size())
        throw ParseError("unterminated '('", node.line, node.column);
      advance();
      return node;
    }
    while (pos_ < text_.size()) {
      c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
          c == ';')
        break;
      node.token.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      advance();
    }
    return node;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
  return Lexer(text).parse_all();
}

void fail_at(const SExpr& where, const std::string& message) {
  throw ParseError(message, where.line, where.column);
}

}  // namespace plancomm::pddl::detail
