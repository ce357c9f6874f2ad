#include <sstream>

#include "plancomm/pddl.hpp"

namespace plancomm::pddl {

namespace {

void write_typed(std::ostream& out, const std::vector<TypedName>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out << ' ';
    out << names[i].name << " - " << names[i].type;
  }
}

void write_atom(std::ostream& out, const std::string& pred,
                const std::vector<std::string>& args) {
  out << '(' << pred;
  for (const std::string& a : args) out << ' ' << a;
  out << ')';
}

}  // namespace

std::string write_domain(const Domain& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const std::string& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (!d.types.empty()) {
    out << "  (:types ";
    write_typed(out, d.types);
    out << ")\n";
  }
  if (!d.constants.empty()) {
    out << "  (:constants ";
    write_typed(out, d.constants);
    out << ")\n";
  }
  out << "  (:predicates";
  for (const PredicateSchema& p : d.predicates) {
    out << "\n    (" << p.name;
    if (!p.params.empty()) out << ' ';
    write_typed(out, p.params);
    out << ')';
  }
  out << ")\n";
  for (const Operator& op : d.operators) {
    out << "  (:action " << op.name << "\n    :parameters (";
    write_typed(out, op.params);
    out << ")\n    :precondition (and";
    for (const Literal& l : op.precondition) {
      out << ' ';
      if (l.negated) out << "(not ";
      write_atom(out, l.atom.predicate, l.atom.args);
      if (l.negated) out << ')';
    }
    out << ")\n    :effect (and";
    for (const Atom& a : op.add) {
      out << ' ';
      write_atom(out, a.predicate, a.args);
    }
    for (const Atom& a : op.del) {
      out << " (not ";
      write_atom(out, a.predicate, a.args);
      out << ')';
    }
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

std::string write_problem(const Problem& p) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n";
  if (!p.domain_name.empty()) out << "  (:domain " << p.domain_name << ")\n";
  out << "  (:objects ";
  write_typed(out, p.objects);
  out << ")\n  (:init";
  for (const GroundAtom& a : p.init) out << "\n    " << a.str();
  out << ")\n  (:goal (and";
  for (const GroundAtom& a : p.goal) out << ' ' << a.str();
  out << ")))\n";
  return out.str();
}

}  // namespace plancomm::pddl
