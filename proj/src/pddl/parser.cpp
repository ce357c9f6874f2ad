#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "plancomm/error.hpp"
#include "plancomm/pddl.hpp"
#include "sexpr.hpp"

namespace plancomm::pddl {

using detail::fail_at;
using detail::SExpr;

namespace {

constexpr std::array<std::string_view, 4> kSupportedRequirements = {
    ":strips", ":typing", ":negative-preconditions", ":equality"};

[[noreturn]] void invalid(const SExpr& where, const std::string& message) {
  throw ValidationError(message + " at line " + std::to_string(where.line) +
                        ", column " + std::to_string(where.column));
}

const std::string& expect_token(const SExpr& e, const char* what) {
  if (e.is_list) fail_at(e, std::string("expected ") + what);
  return e.token;
}

bool is_variable(std::string_view s) { return !s.empty() && s.front() == '?'; }

// "a b - t c" -> [(a,t) (b,t) (c,object)]
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items,
                                        std::size_t begin = 0) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (e.is_list) {
      if (e.is_form("either")) invalid(e, "'either' types are not supported");
      fail_at(e, "expected a name in typed list");
    }
    if (e.token == "-") {
      if (i + 1 >= items.size()) fail_at(e, "missing type after '-'");
      if (pending == 0) fail_at(e, "type given without names");
      const SExpr& type = items[++i];
      if (type.is_form("either"))
        invalid(type, "'either' types are not supported");
      const std::string& t = expect_token(type, "a type name");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k)
        out[k].type = t;
      pending = 0;
      continue;
    }
    out.push_back(TypedName{e.token, std::string(kRootType)});
    ++pending;
  }
  return out;
}

Atom parse_atom(const SExpr& e) {
  if (!e.is_list || e.items.empty()) fail_at(e, "expected an atom");
  Atom atom;
  atom.predicate = expect_token(e.items.front(), "a predicate name");
  for (std::size_t i = 1; i < e.items.size(); ++i)
    atom.args.push_back(expect_token(e.items[i], "a term"));
  return atom;
}

Literal parse_literal(const SExpr& e) {
  if (e.is_form("not")) {
    if (e.items.size() != 2) fail_at(e, "'not' takes exactly one argument");
    return Literal{parse_atom(e.items[1]), true};
  }
  if (e.is_form("and") || e.is_form("or") || e.is_form("imply") ||
      e.is_form("forall") || e.is_form("exists") || e.is_form("when"))
    invalid(e, "'" + e.items.front().token + "' is outside the STRIPS subset");
  return Literal{parse_atom(e), false};
}

// Flattens an optional (and ...) into its conjuncts.
std::vector<const SExpr*> conjuncts(const SExpr& e) {
  std::vector<const SExpr*> out;
  if (!e.is_list) fail_at(e, "expected a formula");
  if (e.items.empty()) return out;
  if (e.is_form("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      auto inner = conjuncts(e.items[i]);
      out.insert(out.end(), inner.begin(), inner.end());
    }
    return out;
  }
  out.push_back(&e);
  return out;
}

class DomainReader {
 public:
  explicit DomainReader(const SExpr& root) : root_(root) {}

  Domain read() {
    if (!root_.is_form("define")) fail_at(root_, "expected (define ...)");
    if (root_.items.size() < 2 || !root_.items[1].is_form("domain") ||
        root_.items[1].items.size() != 2)
      fail_at(root_, "expected (domain <name>)");
    domain_.name = expect_token(root_.items[1].items[1], "a domain name");

    // Operators are validated after all declarations have been seen.
    std::vector<const SExpr*> actions;
    for (std::size_t i = 2; i < root_.items.size(); ++i) {
      const SExpr& section = root_.items[i];
      if (!section.is_list || section.items.empty() || section.items[0].is_list)
        fail_at(section, "expected a domain section");
      const std::string& key = section.items[0].token;
      if (key == ":requirements") {
        read_requirements(section);
      } else if (key == ":types") {
        read_types(section);
      } else if (key == ":constants") {
        domain_.constants = parse_typed_list(section.items, 1);
      } else if (key == ":predicates") {
        read_predicates(section);
      } else if (key == ":action") {
        actions.push_back(&section);
      } else {
        invalid(section, "unsupported domain section " + key);
      }
    }
    for (const TypedName& c : domain_.constants)
      if (!domain_.has_type(c.type))
        invalid(root_, "constant " + c.name + " has undeclared type " + c.type);
    for (const PredicateSchema& p : domain_.predicates)
      for (const TypedName& param : p.params)
        if (!domain_.has_type(param.type))
          invalid(root_, "predicate " + p.name + " uses undeclared type " +
                             param.type);
    for (const SExpr* a : actions) domain_.operators.push_back(read_action(*a));
    return std::move(domain_);
  }

 private:
  void read_requirements(const SExpr& section) {
    for (std::size_t i = 1; i < section.items.size(); ++i) {
      const std::string& flag = expect_token(section.items[i], "a requirement");
      if (std::find(kSupportedRequirements.begin(), kSupportedRequirements.end(),
                    flag) == kSupportedRequirements.end())
        throw UnsupportedRequirement(flag);
      domain_.requirements.push_back(flag);
    }
  }

  void read_types(const SExpr& section) {
    domain_.types = parse_typed_list(section.items, 1);
    std::set<std::string> declared;
    for (const TypedName& t : domain_.types) declared.insert(t.name);
    for (std::size_t i = 0; i < domain_.types.size(); ++i) {
      const std::string parent = domain_.types[i].type;
      if (parent != kRootType && !declared.count(parent)) {
        domain_.types.push_back(TypedName{parent, std::string(kRootType)});
        declared.insert(parent);
      }
    }
    // Reject cycles.
    for (const TypedName& t : domain_.types) {
      std::string cur = t.type;
      for (std::size_t guard = 0; cur != kRootType; ++guard) {
        if (cur == t.name || guard > domain_.types.size())
          invalid(section, "cyclic type hierarchy at " + t.name);
        auto it = std::find_if(domain_.types.begin(), domain_.types.end(),
                               [&](const TypedName& x) { return x.name == cur; });
        cur = it->type;
      }
    }
  }

  void read_predicates(const SExpr& section) {
    for (std::size_t i = 1; i < section.items.size(); ++i) {
      const SExpr& p = section.items[i];
      if (!p.is_list || p.items.empty()) fail_at(p, "expected a predicate schema");
      PredicateSchema schema;
      schema.name = expect_token(p.items[0], "a predicate name");
      schema.params = parse_typed_list(p.items, 1);
      if (domain_.find_predicate(schema.name))
        invalid(p, "duplicate predicate " + schema.name);
      domain_.predicates.push_back(std::move(schema));
    }
  }

  Operator read_action(const SExpr& section) {
    Operator op;
    if (section.items.size() < 2) fail_at(section, "expected an action name");
    op.name = expect_token(section.items[1], "an action name");
    if (domain_.find_operator(op.name))
      invalid(section, "duplicate action " + op.name);
    const SExpr* pre = nullptr;
    const SExpr* eff = nullptr;
    for (std::size_t i = 2; i < section.items.size(); i += 2) {
      const std::string& key = expect_token(section.items[i], "an action keyword");
      if (i + 1 >= section.items.size()) fail_at(section.items[i], "missing value");
      const SExpr& value = section.items[i + 1];
      if (key == ":parameters") {
        if (!value.is_list) fail_at(value, "expected a parameter list");
        op.params = parse_typed_list(value.items);
      } else if (key == ":precondition") {
        pre = &value;
      } else if (key == ":effect") {
        eff = &value;
      } else {
        invalid(section.items[i], "unsupported action keyword " + key);
      }
    }
    std::set<std::string> names;
    for (const TypedName& p : op.params) {
      if (!is_variable(p.name)) invalid(section, "parameter " + p.name + " must start with '?'");
      if (!names.insert(p.name).second)
        invalid(section, "duplicate parameter " + p.name + " in " + op.name);
      if (!domain_.has_type(p.type))
        invalid(section, "parameter " + p.name + " has undeclared type " + p.type);
    }
    if (pre) {
      for (const SExpr* c : conjuncts(*pre)) {
        Literal lit = parse_literal(*c);
        check_atom(lit.atom, op, *c);
        op.precondition.push_back(std::move(lit));
      }
    }
    if (eff) {
      for (const SExpr* c : conjuncts(*eff)) {
        Literal lit = parse_literal(*c);
        if (lit.atom.predicate == "=") invalid(*c, "equality in effect");
        check_atom(lit.atom, op, *c);
        (lit.negated ? op.del : op.add).push_back(std::move(lit.atom));
      }
    }
    return op;
  }

  void check_atom(const Atom& atom, const Operator& op, const SExpr& where) {
    if (atom.predicate == "=") {
      if (atom.args.size() != 2) invalid(where, "equality takes two terms");
    } else {
      const PredicateSchema* schema = domain_.find_predicate(atom.predicate);
      if (!schema) invalid(where, "undeclared predicate " + atom.predicate);
      if (schema->params.size() != atom.args.size())
        invalid(where, "arity mismatch for " + atom.predicate + ": expected " +
                           std::to_string(schema->params.size()) + ", got " +
                           std::to_string(atom.args.size()));
    }
    for (const std::string& arg : atom.args) {
      if (is_variable(arg)) {
        bool bound = std::any_of(op.params.begin(), op.params.end(),
                                 [&](const TypedName& p) { return p.name == arg; });
        if (!bound) invalid(where, "unbound variable " + arg + " in " + op.name);
      } else {
        bool known = std::any_of(domain_.constants.begin(), domain_.constants.end(),
                                 [&](const TypedName& c) { return c.name == arg; });
        if (!known) invalid(where, "undeclared constant " + arg + " in " + op.name);
      }
    }
  }

  const SExpr& root_;
  Domain domain_;
};

std::optional<std::string> lookup_type(const Domain& domain, const Problem& problem,
                                       std::string_view object) {
  if (auto t = problem.object_type(object)) return t;
  for (const TypedName& c : domain.constants)
    if (c.name == object) return c.type;
  return std::nullopt;
}

void check_ground(const GroundAtom& atom, const Domain& domain,
                  const Problem& problem, const SExpr* where) {
  auto report = [&](const std::string& msg) {
    if (where) invalid(*where, msg);
    throw ValidationError(msg);
  };
  const PredicateSchema* schema = domain.find_predicate(atom.predicate);
  if (!schema) report("undeclared predicate " + atom.predicate);
  if (schema->params.size() != atom.args.size())
    report("arity mismatch for " + atom.predicate);
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const std::string& arg = atom.args[i];
    if (is_variable(arg)) report("non-ground atom " + atom.str());
    auto type = lookup_type(domain, problem, arg);
    if (!type) report("undeclared object " + arg + " in " + atom.str());
    if (!domain.is_subtype(*type, schema->params[i].type))
      report("object " + arg + " of type " + *type + " does not match " +
             schema->params[i].type + " in " + atom.str());
  }
}

GroundAtom to_ground(const SExpr& e) {
  Atom a = parse_atom(e);
  return GroundAtom{std::move(a.predicate), std::move(a.args)};
}

void push_unique(std::vector<GroundAtom>& out, GroundAtom atom) {
  if (std::find(out.begin(), out.end(), atom) == out.end())
    out.push_back(std::move(atom));
}

}  // namespace

const PredicateSchema* Domain::find_predicate(std::string_view n) const {
  for (const PredicateSchema& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const Operator* Domain::find_operator(std::string_view n) const {
  for (const Operator& o : operators)
    if (o.name == n) return &o;
  return nullptr;
}

bool Domain::has_type(std::string_view type) const {
  if (type == kRootType) return true;
  return std::any_of(types.begin(), types.end(),
                     [&](const TypedName& t) { return t.name == type; });
}

bool Domain::is_subtype(std::string_view type, std::string_view ancestor) const {
  std::string cur(type);
  for (std::size_t guard = 0; guard <= types.size() + 1; ++guard) {
    if (cur == ancestor) return true;
    if (cur == kRootType) return false;
    auto it = std::find_if(types.begin(), types.end(),
                           [&](const TypedName& t) { return t.name == cur; });
    if (it == types.end()) return false;
    cur = it->type;
  }
  return false;
}

std::string GroundAtom::str() const {
  std::string s = "(" + predicate;
  for (const std::string& a : args) s += " " + a;
  return s + ")";
}

std::optional<std::string> Problem::object_type(std::string_view object) const {
  for (const TypedName& o : objects)
    if (o.name == object) return o.type;
  return std::nullopt;
}

Domain parse_domain(std::string_view text) {
  auto exprs = detail::parse_sexprs(text);
  if (exprs.empty()) throw ParseError("empty domain text", 1, 1);
  if (exprs.size() > 1) fail_at(exprs[1], "trailing content after domain");
  return DomainReader(exprs.front()).read();
}

Problem parse_problem(std::string_view text, const Domain& domain) {
  auto exprs = detail::parse_sexprs(text);
  if (exprs.empty()) throw ParseError("empty problem text", 1, 1);
  if (exprs.size() > 1) fail_at(exprs[1], "trailing content after problem");
  const SExpr& root = exprs.front();
  if (!root.is_form("define")) fail_at(root, "expected (define ...)");
  if (root.items.size() < 2 || !root.items[1].is_form("problem") ||
      root.items[1].items.size() != 2)
    fail_at(root, "expected (problem <name>)");

  Problem problem;
  problem.name = expect_token(root.items[1].items[1], "a problem name");
  const SExpr* init = nullptr;
  const SExpr* goal = nullptr;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = root.items[i];
    if (!section.is_list || section.items.empty() || section.items[0].is_list)
      fail_at(section, "expected a problem section");
    const std::string& key = section.items[0].token;
    if (key == ":domain") {
      if (section.items.size() != 2) fail_at(section, "expected (:domain <name>)");
      problem.domain_name = expect_token(section.items[1], "a domain name");
    } else if (key == ":objects") {
      problem.objects = parse_typed_list(section.items, 1);
    } else if (key == ":init") {
      init = &section;
    } else if (key == ":goal") {
      goal = &section;
    } else if (key == ":requirements") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const std::string& flag = expect_token(section.items[k], "a requirement");
        if (std::find(kSupportedRequirements.begin(), kSupportedRequirements.end(),
                      flag) == kSupportedRequirements.end())
          throw UnsupportedRequirement(flag);
      }
    } else {
      invalid(section, "unsupported problem section " + key);
    }
  }
  if (!problem.domain_name.empty() && problem.domain_name != domain.name)
    invalid(root, "problem targets domain " + problem.domain_name + ", not " +
                      domain.name);
  std::set<std::string> seen;
  for (const TypedName& o : problem.objects) {
    if (!domain.has_type(o.type))
      invalid(root, "unknown object type " + o.type + " for " + o.name);
    if (!seen.insert(o.name).second) invalid(root, "duplicate object " + o.name);
  }
  if (init) {
    for (std::size_t i = 1; i < init->items.size(); ++i) {
      const SExpr& e = init->items[i];
      if (e.is_form("not")) invalid(e, "negative literal in init");
      GroundAtom atom = to_ground(e);
      check_ground(atom, domain, problem, &e);
      push_unique(problem.init, std::move(atom));
    }
  }
  if (!goal || goal->items.size() < 2) invalid(root, "empty goal");
  if (goal->items.size() > 2) fail_at(*goal, "(:goal ...) takes one formula");
  for (const SExpr* c : conjuncts(goal->items[1])) {
    if (c->is_form("not")) invalid(*c, "negative goals are not supported");
    Literal lit = parse_literal(*c);
    GroundAtom atom{lit.atom.predicate, lit.atom.args};
    check_ground(atom, domain, problem, c);
    push_unique(problem.goal, std::move(atom));
  }
  if (problem.goal.empty()) invalid(root, "empty goal");
  return problem;
}

std::vector<GroundAtom> parse_ground_atoms(std::string_view text) {
  std::string cleaned(text);
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::vector<GroundAtom> out;
  for (const SExpr& e : detail::parse_sexprs(cleaned)) {
    for (const SExpr* c : conjuncts(e)) {
      if (c->is_form("not")) invalid(*c, "negative literal in atom list");
      GroundAtom atom = to_ground(*c);
      for (const std::string& a : atom.args)
        if (is_variable(a)) invalid(*c, "non-ground atom " + atom.str());
      push_unique(out, std::move(atom));
    }
  }
  return out;
}

GroundAtom parse_ground_atom(std::string_view text) {
  auto atoms = parse_ground_atoms(text);
  if (atoms.size() != 1)
    throw ValidationError("expected exactly one atom in '" + std::string(text) + "'");
  return atoms.front();
}

std::vector<std::vector<GroundAtom>> parse_goal_pool(std::string_view text) {
  std::vector<std::vector<GroundAtom>> pool;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find(';');
    if (cut != std::string::npos) line.erase(cut);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      pool.push_back(parse_ground_atoms(line));
    } catch (const ParseError& e) {
      throw ParseError(std::string("goal pool: ") + e.what(), lineno, e.column());
    }
    if (pool.back().empty()) throw ParseError("goal pool: empty goal", lineno, 1);
  }
  return pool;
}

void validate_ground_atom(const GroundAtom& atom, const Domain& domain,
                          const Problem& problem) {
  check_ground(atom, domain, problem, nullptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace plancomm::pddl
