#pragma once

// STRIPS subset of PDDL: :strips, :typing, :negative-preconditions, :equality.
// All identifiers are canonicalized to lowercase on input.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plancomm::pddl {

inline constexpr std::string_view kRootType = "object";

struct TypedName {
  std::string name;
  std::string type{kRootType};

  bool operator==(const TypedName&) const = default;
};

// Possibly lifted atom; arguments starting with '?' are variables.
// The predicate "=" denotes equality.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  bool operator==(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;

  bool operator==(const PredicateSchema&) const = default;
};

struct Operator {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> precondition;
  std::vector<Atom> add;
  std::vector<Atom> del;

  bool operator==(const Operator&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  // Each entry maps a declared type onto its parent type.
  std::vector<TypedName> types;
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  std::vector<Operator> operators;

  bool operator==(const Domain&) const = default;

  const PredicateSchema* find_predicate(std::string_view name) const;
  const Operator* find_operator(std::string_view name) const;
  bool has_type(std::string_view type) const;
  // True when `type` equals `ancestor` or descends from it.
  bool is_subtype(std::string_view type, std::string_view ancestor) const;
};

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const GroundAtom&) const = default;
  bool operator==(const GroundAtom&) const = default;

  // "(pred a b)"
  std::string str() const;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<GroundAtom> init;
  std::vector<GroundAtom> goal;

  bool operator==(const Problem&) const = default;

  std::optional<std::string> object_type(std::string_view object) const;
};

Domain parse_domain(std::string_view text);
Problem parse_problem(std::string_view text, const Domain& domain);

// Conjunction of ground atoms in free form: "(on a b), (clear a)" or
// "(and (on a b) (clear a))". Used for goal pools and config atom lists.
std::vector<GroundAtom> parse_ground_atoms(std::string_view text);
GroundAtom parse_ground_atom(std::string_view text);

// Goal-pool file: one candidate goal per non-blank line; ';' starts a comment.
std::vector<std::vector<GroundAtom>> parse_goal_pool(std::string_view text);

// Checks arity and object existence of `atom` against domain + problem.
void validate_ground_atom(const GroundAtom& atom, const Domain& domain,
                          const Problem& problem);

std::string write_domain(const Domain& domain);
std::string write_problem(const Problem& problem);

std::string read_file(const std::string& path);

}  // namespace plancomm::pddl
