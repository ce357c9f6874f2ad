#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace plancomm::pddl::detail {

struct SExpr {
  bool is_list = false;
  std::string token;  // lowercase; empty for lists
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_token(std::string_view t) const { return !is_list && token == t; }
  // A list whose first element is the token `head`.
  bool is_form(std::string_view head) const {
    return is_list && !items.empty() && items.front().is_token(head);
  }
};

// Parses every top-level expression in `text`.
std::vector<SExpr> parse_sexprs(std::string_view text);

[[noreturn]] void fail_at(const SExpr& where, const std::string& message);

}  // namespace plancomm::pddl::detail
