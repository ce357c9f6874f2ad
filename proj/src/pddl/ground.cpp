#include "plancomm/ground.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "plancomm/error.hpp"

namespace plancomm {

using pddl::GroundAtom;

namespace {

struct LiftedGrounding {
  std::string name;
  std::vector<std::string> args;
  std::vector<GroundAtom> pre, neg_pre, add, del;
};

GroundAtom substitute(const pddl::Atom& atom, const pddl::Operator& op,
                      const std::vector<std::string>& binding) {
  GroundAtom g{atom.predicate, {}};
  g.args.reserve(atom.args.size());
  for (const std::string& term : atom.args) {
    if (!term.empty() && term.front() == '?') {
      auto it = std::find_if(op.params.begin(), op.params.end(),
                             [&](const pddl::TypedName& p) { return p.name == term; });
      g.args.push_back(binding[static_cast<std::size_t>(it - op.params.begin())]);
    } else {
      g.args.push_back(term);
    }
  }
  return g;
}

class Grounder {
 public:
  Grounder(const pddl::Domain& d, const pddl::Problem& p, const GroundOptions& o)
      : domain_(d), problem_(p), options_(o) {
    for (const auto& c : d.constants) objects_.push_back(c);
    for (const auto& obj : p.objects) objects_.push_back(obj);
  }

  std::vector<LiftedGrounding> run() {
    for (const pddl::Operator& op : domain_.operators) {
      std::vector<std::vector<std::string>> candidates;
      for (const pddl::TypedName& param : op.params) {
        std::vector<std::string> c;
        for (const pddl::TypedName& obj : objects_)
          if (domain_.is_subtype(obj.type, param.type)) c.push_back(obj.name);
        candidates.push_back(std::move(c));
      }
      std::vector<std::string> binding(op.params.size());
      enumerate(op, candidates, binding, 0);
    }
    return std::move(out_);
  }

 private:
  void enumerate(const pddl::Operator& op,
                 const std::vector<std::vector<std::string>>& candidates,
                 std::vector<std::string>& binding, std::size_t depth) {
    if (depth == binding.size()) {
      emit(op, binding);
      return;
    }
    for (const std::string& obj : candidates[depth]) {
      binding[depth] = obj;
      enumerate(op, candidates, binding, depth + 1);
    }
  }

  void emit(const pddl::Operator& op, const std::vector<std::string>& binding) {
    LiftedGrounding g;
    g.name = op.name;
    g.args = binding;
    for (const pddl::Literal& lit : op.precondition) {
      GroundAtom atom = substitute(lit.atom, op, binding);
      if (atom.predicate == "=") {
        bool equal = atom.args[0] == atom.args[1];
        if (equal == lit.negated) return;
        continue;
      }
      (lit.negated ? g.neg_pre : g.pre).push_back(std::move(atom));
    }
    for (const pddl::Atom& a : op.add) g.add.push_back(substitute(a, op, binding));
    for (const pddl::Atom& a : op.del) g.del.push_back(substitute(a, op, binding));
    for (const GroundAtom& a : g.pre)
      if (std::find(g.neg_pre.begin(), g.neg_pre.end(), a) != g.neg_pre.end())
        return;  // contradictory, never applicable
    if (out_.size() >= options_.max_actions)
      throw ResourceError("grounding exceeds " + std::to_string(options_.max_actions) +
                          " actions");
    out_.push_back(std::move(g));
  }

  const pddl::Domain& domain_;
  const pddl::Problem& problem_;
  const GroundOptions& options_;
  std::vector<pddl::TypedName> objects_;
  std::vector<LiftedGrounding> out_;
};

std::vector<AtomId> to_ids(const std::vector<GroundAtom>& atoms,
                           const std::map<GroundAtom, AtomId>& index) {
  std::vector<AtomId> ids;
  ids.reserve(atoms.size());
  for (const GroundAtom& a : atoms) ids.push_back(index.at(a));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace

std::string GroundAction::str() const {
  std::string s = "(" + name;
  for (const std::string& a : args) s += " " + a;
  return s + ")";
}

GroundModel::GroundModel(std::vector<GroundAtom> atoms, std::vector<GroundAction> actions)
    : atoms_(std::move(atoms)), actions_(std::move(actions)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    atom_index_.emplace(atoms_[i], static_cast<AtomId>(i));
  consumers_.resize(atoms_.size());
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (actions_[i].pre.empty()) unconditional_.push_back(static_cast<ActionId>(i));
    for (AtomId a : actions_[i].pre) consumers_[a].push_back(static_cast<ActionId>(i));
  }
}

std::optional<AtomId> GroundModel::find_atom(const GroundAtom& atom) const {
  auto it = atom_index_.find(atom);
  if (it == atom_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> GroundModel::find_action(
    const std::string& name, const std::vector<std::string>& args) const {
  auto it = std::lower_bound(actions_.begin(), actions_.end(), std::tie(name, args),
                             [](const GroundAction& a, const auto& key) {
                               return std::tie(a.name, a.args) < key;
                             });
  if (it == actions_.end() || it->name != name || it->args != args) return std::nullopt;
  return static_cast<ActionId>(it - actions_.begin());
}

AtomSet GroundModel::make_set(const std::vector<GroundAtom>& atoms) const {
  AtomSet s(atoms_.size());
  for (const GroundAtom& a : atoms) {
    auto id = find_atom(a);
    if (!id) throw ValidationError("atom " + a.str() + " outside the grounded universe");
    s.insert(*id);
  }
  return s;
}

GroundInstance GroundInstance::with(const std::vector<GroundAtom>& init_atoms,
                                    const std::vector<GroundAtom>& goal_atoms) const {
  return GroundInstance{model, model->make_set(init_atoms), model->make_set(goal_atoms)};
}

GroundInstance ground(const pddl::Domain& domain, const pddl::Problem& problem,
                      const GroundOptions& options) {
  std::vector<LiftedGrounding> all = Grounder(domain, problem, options).run();

  std::vector<bool> keep(all.size(), true);
  if (options.prune_unreachable) {
    // Delete-relaxed reachability, ignoring negative preconditions.
    std::set<GroundAtom> reached(problem.init.begin(), problem.init.end());
    std::fill(keep.begin(), keep.end(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (keep[i]) continue;
        bool ok = std::all_of(all[i].pre.begin(), all[i].pre.end(),
                              [&](const GroundAtom& a) { return reached.count(a) > 0; });
        if (!ok) continue;
        keep[i] = true;
        changed = true;
        reached.insert(all[i].add.begin(), all[i].add.end());
      }
    }
  }

  std::set<GroundAtom> universe(problem.init.begin(), problem.init.end());
  universe.insert(problem.goal.begin(), problem.goal.end());
  universe.insert(options.extra_atoms.begin(), options.extra_atoms.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!keep[i]) continue;
    for (const auto* list : {&all[i].pre, &all[i].neg_pre, &all[i].add, &all[i].del})
      universe.insert(list->begin(), list->end());
  }
  std::vector<GroundAtom> atoms(universe.begin(), universe.end());
  std::map<GroundAtom, AtomId> index;
  for (std::size_t i = 0; i < atoms.size(); ++i) index.emplace(atoms[i], static_cast<AtomId>(i));

  std::vector<GroundAction> actions;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!keep[i]) continue;
    GroundAction a;
    a.name = all[i].name;
    a.args = all[i].args;
    a.pre = to_ids(all[i].pre, index);
    a.neg_pre = to_ids(all[i].neg_pre, index);
    a.add = to_ids(all[i].add, index);
    std::vector<AtomId> del = to_ids(all[i].del, index);
    // Add wins over delete for atoms in both lists.
    std::erase_if(del, [&](AtomId d) {
      return std::binary_search(a.add.begin(), a.add.end(), d);
    });
    a.del = std::move(del);
    actions.push_back(std::move(a));
  }
  std::sort(actions.begin(), actions.end(), [](const GroundAction& x, const GroundAction& y) {
    return std::tie(x.name, x.args) < std::tie(y.name, y.args);
  });
  actions.erase(std::unique(actions.begin(), actions.end(),
                            [](const GroundAction& x, const GroundAction& y) {
                              return x.name == y.name && x.args == y.args;
                            }),
                actions.end());

  auto model = std::make_shared<const GroundModel>(std::move(atoms), std::move(actions));
  GroundInstance inst{model, model->make_set(problem.init), model->make_set(problem.goal)};
  return inst;
}

}  // namespace plancomm
