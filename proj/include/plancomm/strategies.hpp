#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plancomm/mirror.hpp"

namespace plancomm {

enum class Strategy { Increasing, Decreasing, Informative, InformativeNested };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

// Increasing: first N distinct plan actions in plan order.
// Decreasing: last N distinct plan actions in reversed plan order.
// Informative / InformativeNested: exhaustive / greedy search, plan order.
Verbalization select(Strategy strategy, const MirrorModel& model, std::size_t n);

// Sentence templates keyed by operator name. Slots:
//   {argN}       N-th argument (1-based), shown through its "name" attribute if set
//   {argN.attr}  attribute `attr` of the N-th argument
//   {attr}       attribute `attr` of the first argument that defines it
// Text file format, one entry per line ('#' comments):
//   grab: I will grab a {color} {shape}.
//   @circle1.color: red
class TemplateTable {
 public:
  static TemplateTable parse(std::string_view text);
  static TemplateTable load(const std::string& path);

  void set_template(std::string op, std::string text);
  void set_attribute(std::string object, std::string attr, std::string value);
  const std::string* find_template(const std::string& op) const;
  const std::string* find_attribute(const std::string& object, const std::string& attr) const;

  std::string render(const GroundAction& action) const;

 private:
  std::map<std::string, std::string> templates_;
  std::map<std::string, std::map<std::string, std::string>> attributes_;
};

std::vector<std::string> render(const Verbalization& o, const GroundModel& model,
                                const TemplateTable& templates);

}  // namespace plancomm
