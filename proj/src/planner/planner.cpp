#include "plancomm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "plancomm/error.hpp"

namespace plancomm {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Prefix trie over forbidden action sequences.
class ForbiddenPlans {
 public:
  ForbiddenPlans() : nodes_(1) {}

  void add(const Plan& plan) {
    int cur = 0;
    for (ActionId a : plan.actions) {
      auto it = nodes_[cur].children.find(a);
      if (it == nodes_[cur].children.end()) {
        nodes_.push_back({});
        int next = static_cast<int>(nodes_.size()) - 1;
        nodes_[cur].children.emplace(a, next);
        cur = next;
      } else {
        cur = it->second;
      }
    }
    nodes_[cur].terminal = true;
  }

  // -1 is "off the trie": no forbidden plan has this prefix.
  int step(int node, ActionId a) const {
    if (node < 0) return -1;
    auto it = nodes_[node].children.find(a);
    return it == nodes_[node].children.end() ? -1 : it->second;
  }
  bool forbidden(int node) const { return node >= 0 && nodes_[node].terminal; }

 private:
  struct Node {
    std::map<ActionId, int> children;
    bool terminal = false;
  };
  std::vector<Node> nodes_;
};

struct SearchKey {
  AtomSet state;
  int trie;
  bool operator==(const SearchKey&) const = default;
};

struct SearchKeyHash {
  std::size_t operator()(const SearchKey& k) const {
    return k.state.hash() ^ (static_cast<std::size_t>(k.trie + 1) * 0x9e3779b97f4a7c15ull);
  }
};

class HMax {
 public:
  explicit HMax(const GroundInstance& inst) : inst_(inst) {
    const GroundModel& m = *inst.model;
    level_.resize(m.atoms().size());
    counter_.resize(m.actions().size());
    goal_ = inst.goal.members();
    is_goal_.assign(m.atoms().size(), 0);
    for (AtomId g : goal_) is_goal_[g] = 1;
  }

  std::optional<std::size_t> operator()(const AtomSet& state) {
    const GroundModel& m = *inst_.model;
    if (goal_.empty()) return 0;
    std::fill(level_.begin(), level_.end(), kUnreached);
    for (std::size_t i = 0; i < counter_.size(); ++i)
      counter_[i] = static_cast<std::uint32_t>(m.action(static_cast<ActionId>(i)).pre.size());
    queue_.clear();
    for (AtomId a : state.members()) {
      level_[a] = 0;
      queue_.push_back(a);
    }
    for (ActionId act : m.unconditional()) fire(act, 0);
    std::size_t goals_left = goal_.size();
    while (!queue_.empty()) {
      AtomId a = queue_.front();
      queue_.pop_front();
      std::size_t lvl = level_[a];
      if (is_goal_[a] && --goals_left == 0) return lvl;
      for (ActionId act : m.consumers(a))
        if (--counter_[act] == 0) fire(act, lvl);
    }
    return std::nullopt;
  }

 private:
  void fire(ActionId act, std::size_t lvl) {
    for (AtomId b : inst_.model->action(act).add) {
      if (level_[b] == kUnreached) {
        level_[b] = lvl + 1;
        queue_.push_back(b);
      }
    }
  }

  const GroundInstance& inst_;
  std::vector<std::size_t> level_;
  std::vector<std::uint32_t> counter_;
  std::vector<AtomId> goal_;
  std::vector<char> is_goal_;
  std::deque<AtomId> queue_;
};

std::optional<Plan> astar(const GroundInstance& inst, const ForbiddenPlans& forbidden,
                          const SearchOptions& options) {
  const GroundModel& m = *inst.model;
  HMax h(inst);

  struct Node {
    SearchKey key;
    std::size_t g;
    std::size_t parent;
    ActionId via;
  };
  std::vector<Node> nodes;
  std::unordered_map<SearchKey, std::size_t, SearchKeyHash> index;
  // (f, h, serial, node) ascending; the serial makes tie-breaking FIFO and
  // deterministic. Improved nodes are re-queued; stale entries are skipped.
  using Entry = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<std::size_t> hvalue;
  std::vector<char> closed;
  std::size_t serial = 0;

  auto h0 = h(inst.init);
  if (!h0) return std::nullopt;
  nodes.push_back({SearchKey{inst.init, 0}, 0, 0, 0});
  hvalue.push_back(*h0);
  closed.push_back(0);
  index.emplace(nodes[0].key, 0);
  open.emplace(*h0, *h0, serial++, 0);

  std::size_t expansions = 0;
  while (!open.empty()) {
    auto [f, hv, ser, id] = open.top();
    open.pop();
    if (closed[id] || f != nodes[id].g + hvalue[id]) continue;
    closed[id] = 1;
    const SearchKey key = nodes[id].key;
    const std::size_t g = nodes[id].g;

    if (key.state.contains_all(inst.goal) && !forbidden.forbidden(key.trie)) {
      Plan plan;
      for (std::size_t cur = id; cur != 0; cur = nodes[cur].parent)
        plan.actions.push_back(nodes[cur].via);
      std::reverse(plan.actions.begin(), plan.actions.end());
      return plan;
    }
    if (++expansions > options.max_expansions)
      throw ResourceError("search exceeded " + std::to_string(options.max_expansions) +
                          " expansions");

    for (std::size_t ai = 0; ai < m.actions().size(); ++ai) {
      const auto act_id = static_cast<ActionId>(ai);
      const GroundAction& act = m.action(act_id);
      if (!is_applicable(act, key.state)) continue;
      SearchKey next{apply_action(act, key.state), forbidden.step(key.trie, act_id)};
      const std::size_t ng = g + 1;
      auto it = index.find(next);
      if (it != index.end()) {
        const std::size_t nid = it->second;
        if (closed[nid] || nodes[nid].g <= ng) continue;
        nodes[nid].g = ng;
        nodes[nid].parent = id;
        nodes[nid].via = act_id;
        open.emplace(ng + hvalue[nid], hvalue[nid], serial++, nid);
        continue;
      }
      auto hn = h(next.state);
      if (!hn) continue;
      nodes.push_back({next, ng, id, act_id});
      const std::size_t nid = nodes.size() - 1;
      hvalue.push_back(*hn);
      closed.push_back(0);
      index.emplace(std::move(next), nid);
      open.emplace(ng + *hn, *hn, serial++, nid);
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_applicable(const GroundAction& action, const AtomSet& state) {
  return state.contains_all(action.pre) && state.contains_none(action.neg_pre);
}

AtomSet apply_action(const GroundAction& action, const AtomSet& state) {
  AtomSet next = state;
  for (AtomId d : action.del) next.erase(d);
  for (AtomId a : action.add) next.insert(a);
  return next;
}

std::optional<std::size_t> hmax(const GroundInstance& instance, const AtomSet& state) {
  return HMax(instance)(state);
}

std::optional<Plan> plan_optimal(const GroundInstance& instance,
                                 const SearchOptions& options) {
  return astar(instance, ForbiddenPlans{}, options);
}

std::optional<WeightedPlanSet> plan_topk(const GroundInstance& instance, std::size_t k,
                                         double tau, const SearchOptions& options) {
  if (k == 0) throw RangeError("plan_topk: k must be positive");
  ForbiddenPlans forbidden;
  WeightedPlanSet out;
  while (out.plans.size() < k) {
    auto plan = astar(instance, forbidden, options);
    if (!plan) break;
    forbidden.add(*plan);
    out.plans.push_back(std::move(*plan));
  }
  if (out.plans.empty()) return std::nullopt;
  std::sort(out.plans.begin(), out.plans.end(), [](const Plan& a, const Plan& b) {
    if (a.cost() != b.cost()) return a.cost() < b.cost();
    return a.actions < b.actions;
  });
  out.optimal_cost = out.plans.front().cost();
  double total = 0.0;
  for (const Plan& p : out.plans) {
    double gap = static_cast<double>(out.optimal_cost) - static_cast<double>(p.cost());
    out.weights.push_back(std::exp(tau * gap));
    total += out.weights.back();
  }
  for (double& w : out.weights) w /= total;
  return out;
}

bool validate_plan(const GroundInstance& instance, const Plan& plan) {
  AtomSet state = instance.init;
  for (ActionId a : plan.actions) {
    if (a >= instance.model->actions().size()) return false;
    const GroundAction& act = instance.model->action(a);
    if (!is_applicable(act, state)) return false;
    state = apply_action(act, state);
  }
  return state.contains_all(instance.goal);
}

std::string format_plan(const GroundModel& model, const Plan& plan) {
  std::string out;
  for (ActionId a : plan.actions) out += model.action(a).str() + "\n";
  return out;
}

}  // namespace plancomm
