#include "plancomm/strategies.hpp"

#include <algorithm>
#include <sstream>

#include "plancomm/error.hpp"
#include "plancomm/pddl.hpp"

namespace plancomm {

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void check_range(const MirrorModel& model, std::size_t n) {
  if (n < 1 || n > model.distinct_actions().size())
    throw RangeError("verbalization size " + std::to_string(n) + " outside [1, " +
                     std::to_string(model.distinct_actions().size()) + "]");
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Increasing: return "increasing";
    case Strategy::Decreasing: return "decreasing";
    case Strategy::Informative: return "informative";
    case Strategy::InformativeNested: return "informative-nested";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::Increasing, Strategy::Decreasing, Strategy::Informative,
                     Strategy::InformativeNested})
    if (name == to_string(s)) return s;
  return std::nullopt;
}

Verbalization select(Strategy strategy, const MirrorModel& model, std::size_t n) {
  check_range(model, n);
  const auto& actions = model.robot_plan().actions;
  Verbalization v;
  auto take = [&](std::size_t pos) {
    if (std::find(v.actions.begin(), v.actions.end(), actions[pos]) != v.actions.end())
      return;
    v.actions.push_back(actions[pos]);
    v.positions.push_back(pos);
  };
  switch (strategy) {
    case Strategy::Increasing:
      for (std::size_t pos = 0; pos < actions.size() && v.size() < n; ++pos) take(pos);
      return v;
    case Strategy::Decreasing:
      for (std::size_t pos = actions.size(); pos > 0 && v.size() < n; --pos) take(pos - 1);
      return v;
    case Strategy::Informative:
      return find_most_informative(model, n);
    case Strategy::InformativeNested:
      return find_most_informative_nested(model, n);
  }
  return v;
}

TemplateTable TemplateTable::parse(std::string_view text) {
  TemplateTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto colon = s.find(':');
    if (colon == std::string::npos)
      throw ParseError("template line without ':'", lineno, 1);
    std::string key = trim(s.substr(0, colon));
    std::string value = trim(s.substr(colon + 1));
    if (key.empty()) throw ParseError("empty template key", lineno, 1);
    if (key.front() == '@') {
      auto dot = key.find('.');
      if (dot == std::string::npos || dot == 1 || dot + 1 == key.size())
        throw ParseError("attribute key must be @object.attr", lineno, 1);
      t.set_attribute(lower(key.substr(1, dot - 1)), key.substr(dot + 1), value);
    } else {
      t.set_template(lower(key), value);
    }
  }
  return t;
}

TemplateTable TemplateTable::load(const std::string& path) {
  return parse(pddl::read_file(path));
}

void TemplateTable::set_template(std::string op, std::string text) {
  templates_[std::move(op)] = std::move(text);
}

void TemplateTable::set_attribute(std::string object, std::string attr, std::string value) {
  attributes_[std::move(object)][std::move(attr)] = std::move(value);
}

const std::string* TemplateTable::find_template(const std::string& op) const {
  auto it = templates_.find(op);
  return it == templates_.end() ? nullptr : &it->second;
}

const std::string* TemplateTable::find_attribute(const std::string& object,
                                                 const std::string& attr) const {
  auto it = attributes_.find(object);
  if (it == attributes_.end()) return nullptr;
  auto jt = it->second.find(attr);
  return jt == it->second.end() ? nullptr : &jt->second;
}

std::string TemplateTable::render(const GroundAction& action) const {
  const std::string* tpl = find_template(action.name);
  if (!tpl) return action.str();

  auto resolve = [&](const std::string& slot) -> std::optional<std::string> {
    if (slot.rfind("arg", 0) == 0) {
      auto dot = slot.find('.');
      std::string num = slot.substr(3, dot == std::string::npos ? std::string::npos : dot - 3);
      if (num.empty() || !std::all_of(num.begin(), num.end(), ::isdigit)) return std::nullopt;
      std::size_t idx = std::stoul(num);
      if (idx < 1 || idx > action.args.size()) return std::nullopt;
      const std::string& obj = action.args[idx - 1];
      if (dot == std::string::npos) {
        const std::string* pretty = find_attribute(obj, "name");
        return pretty ? *pretty : obj;
      }
      const std::string* v = find_attribute(obj, slot.substr(dot + 1));
      if (!v) return std::nullopt;
      return *v;
    }
    for (const std::string& obj : action.args)
      if (const std::string* v = find_attribute(obj, slot)) return *v;
    return std::nullopt;
  };

  std::string out;
  for (std::size_t i = 0; i < tpl->size(); ++i) {
    char c = (*tpl)[i];
    if (c != '{') {
      out.push_back(c);
      continue;
    }
    auto close = tpl->find('}', i);
    if (close == std::string::npos) return action.str();
    auto value = resolve(tpl->substr(i + 1, close - i - 1));
    if (!value) return action.str();
    out += *value;
    i = close;
  }
  return out;
}

std::vector<std::string> render(const Verbalization& o, const GroundModel& model,
                                const TemplateTable& templates) {
  std::vector<std::string> out;
  out.reserve(o.size());
  for (ActionId a : o.actions) out.push_back(templates.render(model.action(a)));
  return out;
}

}  // namespace plancomm
