#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plancomm/atom_set.hpp"
#include "plancomm/pddl.hpp"

namespace plancomm {

using ActionId = std::uint32_t;

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  // Sorted, duplicate-free atom indices. `add` and `del` are disjoint.
  std::vector<AtomId> pre;
  std::vector<AtomId> neg_pre;
  std::vector<AtomId> add;
  std::vector<AtomId> del;

  // "(name a b)", the identity used for membership tests.
  std::string str() const;
};

// Atom universe and ground actions shared by every instance that differs
// only in its initial state and goal. Atoms are in canonical lexicographic
// order; actions are ordered by (name, args).
class GroundModel {
 public:
  GroundModel(std::vector<pddl::GroundAtom> atoms, std::vector<GroundAction> actions);

  const std::vector<pddl::GroundAtom>& atoms() const { return atoms_; }
  const std::vector<GroundAction>& actions() const { return actions_; }
  const pddl::GroundAtom& atom(AtomId id) const { return atoms_[id]; }
  const GroundAction& action(ActionId id) const { return actions_[id]; }

  std::optional<AtomId> find_atom(const pddl::GroundAtom& atom) const;
  std::optional<ActionId> find_action(const std::string& name,
                                      const std::vector<std::string>& args) const;
  // Throws ValidationError on atoms outside the universe.
  AtomSet make_set(const std::vector<pddl::GroundAtom>& atoms) const;

  // Actions whose positive preconditions include the given atom.
  const std::vector<ActionId>& consumers(AtomId atom) const { return consumers_[atom]; }
  const std::vector<ActionId>& unconditional() const { return unconditional_; }

 private:
  std::vector<pddl::GroundAtom> atoms_;
  std::vector<GroundAction> actions_;
  std::map<pddl::GroundAtom, AtomId> atom_index_;
  std::vector<std::vector<ActionId>> consumers_;
  std::vector<ActionId> unconditional_;
};

struct GroundInstance {
  std::shared_ptr<const GroundModel> model;
  AtomSet init;
  AtomSet goal;

  // Same universe and actions, different initial state / goal.
  GroundInstance with(const std::vector<pddl::GroundAtom>& init_atoms,
                      const std::vector<pddl::GroundAtom>& goal_atoms) const;
};

struct GroundOptions {
  bool prune_unreachable = true;
  std::size_t max_actions = 1'000'000;
  // Atoms forced into the universe even when unreachable (e.g. goals of
  // alternative candidate goals sharing this model).
  std::vector<pddl::GroundAtom> extra_atoms;
};

GroundInstance ground(const pddl::Domain& domain, const pddl::Problem& problem,
                      const GroundOptions& options = {});

}  // namespace plancomm
