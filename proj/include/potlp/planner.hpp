#pragma once

#include <bitset>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <thread>
#include <unordered_map>

#include "potlp/estimate.hpp"
#include "potlp/rng.hpp"

namespace potlp {

inline constexpr double cost_inf = std::numeric_limits<double>::infinity();

/* One candidate move in the abstract decision problem the search runs on:
 * travel to an anchor (a frontier subgoal) and push the automaton from
 * z_prime to z_dprime, with outcome statistics fixed for the whole search. */
struct planner_action {
  int anchor = 0;     // subgoal index the action travels to
  int z_prime = -1;   // automaton state the attempt departs from
  int z_dprime = -1;  // automaton state reached on success
  double d0 = 0;      // travel cost from the root pose
  estimate_triple est;
};

/* Self-contained decision problem: actions, anchor-to-anchor travel costs,
 * and per-(anchor, state) completion costs. Anchor -1 is the root pose and
 * maps to row/column 0 of the tables; subgoal i maps to i+1. Rollouts over
 * this structure never touch the grid, so synthetic instances exercise the
 * search exactly like real ones. */
struct planning_instance {
  int nz = 0;
  int root_z = 0;
  std::vector<char> accepting;                    // per automaton state
  std::vector<planner_action> actions;
  std::vector<std::vector<double>> travel;        // [anchor+1][anchor+1]
  std::vector<std::vector<double>> finish;        // [anchor+1][z], cost_inf when impossible
  double fail_cost = 0;

  double travel_between(int from, int to) const { return travel[from + 1][to + 1]; }
  double finish_cost(int anchor, int z) const { return finish[anchor + 1][z]; }
  int finish_id() const { return static_cast<int>(actions.size()); }
};

struct planner_config {
  double c_ucb = 50;      // exploration bonus, in cost units
  int n_sims = 2000;
  int max_depth = 12;
  uint64_t seed = 1;
  size_t max_exact_nodes = 1000000; // expectimax state budget
  std::ostream* trace = nullptr;    // one line per simulation when set
};

namespace detail {

inline constexpr size_t max_tree_actions = 256;

using action_mask = std::bitset<max_tree_actions>;

/* Automaton states reachable from z by chaining transitions already proven
 * to succeed; such actions can be replayed at will, so their target states
 * count as attainable departure points. */
inline uint64_t chain_reach(const planning_instance& inst, int z, const action_mask& succeeded) {
  uint64_t reach = 1ull << z;
  bool grew = true;
  while (grew) {
    grew = false;
    for (size_t i = 0; i < inst.actions.size(); ++i) {
      if (!succeeded[i]) continue;
      const planner_action& a = inst.actions[i];
      if ((reach >> a.z_prime) & 1ull && !((reach >> a.z_dprime) & 1ull)) {
        reach |= 1ull << a.z_dprime;
        grew = true;
      }
    }
  }
  return reach;
}

/* Actions usable from a rollout node. The root keeps the full enumerated
 * set (its departure states were vetted against real known-space paths);
 * deeper nodes require the departure state to be current or replayable,
 * and transitions that failed stay pruned for the rest of the rollout. */
inline void available_actions(const planning_instance& inst, int anchor, int z, bool at_root,
                              const action_mask& failed, const action_mask& succeeded,
                              std::vector<int>& out) {
  out.clear();
  if (inst.nz > 64) fail(errc::param, "automaton too large for reachability mask");
  uint64_t reach = at_root ? 0 : chain_reach(inst, z, succeeded);
  for (size_t i = 0; i < inst.actions.size(); ++i) {
    if (failed[i]) continue;
    const planner_action& a = inst.actions[i];
    if (inst.travel_between(anchor, a.anchor) == cost_inf) continue;
    if (!at_root && a.z_prime != z && !((reach >> a.z_prime) & 1ull)) continue;
    out.push_back(static_cast<int>(i));
  }
  if (inst.finish_cost(anchor, z) != cost_inf) out.push_back(inst.finish_id());
}

} // namespace detail

struct expectimax_result {
  int best = -1;                       // action id, finish_id() for completion
  double value = 0;
  std::vector<double> root_q;          // per action id, cost_inf when unavailable
};

/* Exact value of the decision problem by full outcome-tree expansion,
 * memoized on (anchor, state, pruned set, proven set). Only feasible for
 * small instances; the node budget turns blowups into a clean error. */
inline expectimax_result exact_expectimax(const planning_instance& inst,
                                          planner_config cfg = {}) {
  if (inst.actions.size() > 64)
    fail(errc::instance_too_large, "expectimax supports at most 64 actions");

  struct key {
    int anchor;
    int z;
    uint64_t failed, succeeded;
    bool operator==(const key&) const = default;
  };
  struct key_hash {
    size_t operator()(const key& k) const {
      uint64_t h = static_cast<uint64_t>(k.anchor + 2) * 0x9e3779b97f4a7c15ULL;
      h ^= static_cast<uint64_t>(k.z) + (h << 6) + (h >> 2);
      h ^= k.failed + (h << 6) + (h >> 2);
      h ^= k.succeeded + (h << 6) + (h >> 2);
      return static_cast<size_t>(h);
    }
  };
  std::unordered_map<key, double, key_hash> memo;
  std::unordered_map<key, char, key_hash> in_progress;

  std::function<double(int, int, uint64_t, uint64_t)> value =
      [&](int anchor, int z, uint64_t failed, uint64_t succeeded) -> double {
    if (inst.accepting[z]) return 0;
    key k{anchor, z, failed, succeeded};
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    // a state currently being evaluated can only be re-entered by paying a
    // cycle of non-negative cost, so that branch never improves the value
    if (in_progress.count(k)) return cost_inf;
    if (memo.size() + in_progress.size() > cfg.max_exact_nodes)
      fail(errc::instance_too_large, "expectimax state budget exceeded");
    in_progress.emplace(k, 1);

    bool at_root = failed == 0 && succeeded == 0;
    std::vector<int> avail;
    detail::available_actions(inst, anchor, z, at_root,
                              detail::action_mask(failed), detail::action_mask(succeeded), avail);
    double best = cost_inf;
    for (int id : avail) {
      double q;
      if (id == inst.finish_id()) {
        q = inst.finish_cost(anchor, z);
      } else {
        const planner_action& a = inst.actions[id];
        double d = at_root ? a.d0 : inst.travel_between(anchor, a.anchor);
        double p = ((succeeded >> id) & 1ull) ? 1.0 : a.est.p_success;
        q = d;
        if (p > 0)
          q += p * (a.est.cost_success +
                    value(a.anchor, a.z_dprime, failed, succeeded | (1ull << id)));
        if (p < 1)
          q += (1 - p) * (a.est.cost_failure +
                          value(a.anchor, a.z_prime, failed | (1ull << id), succeeded));
      }
      best = std::min(best, q);
    }
    if (avail.empty()) best = inst.fail_cost;
    in_progress.erase(k);
    memo.emplace(k, best);
    return best;
  };

  expectimax_result out;
  out.root_q.assign(inst.actions.size() + 1, cost_inf);
  std::vector<int> root_avail;
  detail::available_actions(inst, -1, inst.root_z, true, {}, {}, root_avail);
  if (inst.accepting[inst.root_z]) {
    out.best = inst.finish_id();
    out.value = 0;
    out.root_q[inst.finish_id()] = 0;
    return out;
  }
  out.value = cost_inf;
  for (int id : root_avail) {
    double q;
    if (id == inst.finish_id()) {
      q = inst.finish_cost(-1, inst.root_z);
    } else {
      const planner_action& a = inst.actions[id];
      double p = a.est.p_success;
      q = a.d0;
      if (p > 0) q += p * (a.est.cost_success + value(a.anchor, a.z_dprime, 0, 1ull << id));
      if (p < 1) q += (1 - p) * (a.est.cost_failure + value(a.anchor, a.z_prime, 1ull << id, 0));
    }
    out.root_q[id] = q;
    if (q < out.value) {
      out.value = q;
      out.best = id;
    }
  }
  if (root_avail.empty()) {
    out.value = inst.fail_cost;
    out.best = -1;
  }
  return out;
}

struct action_stats {
  int visits = 0;
  double mean = 0;
};

struct pouct_result {
  int best = -1;                         // action id, finish_id() for completion
  double value = 0;                      // mean return of the chosen action
  std::vector<action_stats> root;        // per action id (finish last)
  int root_visits = 0;
};

namespace detail {

struct tree_node {
  int anchor;
  int z;
  bool at_root;
  action_mask failed, succeeded;
  std::vector<int> avail;                // computed once at creation
  int visits = 0;
  std::map<int, action_stats> stats;     // per action id
  std::map<std::pair<int, char>, int> children; // (action, outcome) -> node index
};

} // namespace detail

/* Monte Carlo tree search over rollout histories: UCB action selection in
 * the cost-minimizing form (subtract the exploration bonus, untried actions
 * first in id order), one new node expanded per simulation, uniform-random
 * rollouts below the tree, mean backups. Terminal values: 0 at accepting
 * states, fail_cost at dead ends and the depth cutoff. */
inline pouct_result pouct_search(const planning_instance& inst, planner_config cfg = {}) {
  if (inst.actions.size() >= detail::max_tree_actions)
    fail(errc::param, "too many actions for the search mask");
  rng random(cfg.seed);

  std::vector<detail::tree_node> nodes;
  auto make_node = [&](int anchor, int z, bool at_root, detail::action_mask failed,
                       detail::action_mask succeeded) {
    detail::tree_node n;
    n.anchor = anchor;
    n.z = z;
    n.at_root = at_root;
    n.failed = failed;
    n.succeeded = succeeded;
    detail::available_actions(inst, anchor, z, at_root, failed, succeeded, n.avail);
    nodes.push_back(std::move(n));
    return static_cast<int>(nodes.size()) - 1;
  };
  make_node(-1, inst.root_z, true, {}, {});

  struct step {
    int node;
    int action;
    double cost;
  };

  for (int sim = 0; sim < cfg.n_sims; ++sim) {
    std::vector<step> path;
    double tail = 0;
    int at = 0;
    int depth = 0;
    bool expanded = false;

    while (true) {
      detail::tree_node& node = nodes[at];
      if (inst.accepting[node.z]) {
        tail = 0;
        break;
      }
      if (node.avail.empty() || depth >= cfg.max_depth) {
        tail = inst.fail_cost;
        break;
      }

      int chosen = -1;
      for (int id : node.avail)
        if (!node.stats.count(id)) {
          chosen = id;
          break;
        }
      if (chosen < 0) {
        double best = cost_inf;
        for (int id : node.avail) {
          const action_stats& s = node.stats.at(id);
          double u = s.mean - cfg.c_ucb * std::sqrt(std::log(static_cast<double>(node.visits)) /
                                                    s.visits);
          if (u < best) {
            best = u;
            chosen = id;
          }
        }
      }

      if (chosen == inst.finish_id()) {
        path.push_back({at, chosen, inst.finish_cost(node.anchor, node.z)});
        tail = 0;
        break;
      }
      const planner_action& a = inst.actions[chosen];
      double p = node.succeeded[chosen] ? 1.0 : a.est.p_success;
      bool success = random.bernoulli(p);
      double travel = node.at_root ? a.d0 : inst.travel_between(node.anchor, a.anchor);
      double cost = travel + (success ? a.est.cost_success : a.est.cost_failure);
      path.push_back({at, chosen, cost});
      ++depth;

      auto child_key = std::make_pair(chosen, static_cast<char>(success));
      auto it = nodes[at].children.find(child_key);
      if (it != nodes[at].children.end()) {
        at = it->second;
        continue;
      }

      // expansion: materialize the child, then leave the tree
      detail::action_mask failed = nodes[at].failed;
      detail::action_mask succeeded = nodes[at].succeeded;
      if (success)
        succeeded.set(chosen);
      else
        failed.set(chosen);
      int z2 = success ? a.z_dprime : a.z_prime;
      int child = make_node(a.anchor, z2, false, failed, succeeded);
      nodes[at].children.emplace(child_key, child);
      at = child;
      expanded = true;
      break;
    }

    if (expanded) {
      // uniform-random rollout from the new node
      detail::tree_node& leaf = nodes[at];
      int anchor = leaf.anchor;
      int z = leaf.z;
      detail::action_mask failed = leaf.failed;
      detail::action_mask succeeded = leaf.succeeded;
      std::vector<int> avail = leaf.avail;
      while (true) {
        if (inst.accepting[z]) break;
        if (avail.empty() || depth >= cfg.max_depth) {
          tail += inst.fail_cost;
          break;
        }
        int id = avail[random.next_below(avail.size())];
        if (id == inst.finish_id()) {
          tail += inst.finish_cost(anchor, z);
          break;
        }
        const planner_action& a = inst.actions[id];
        double p = succeeded[id] ? 1.0 : a.est.p_success;
        bool success = random.bernoulli(p);
        tail += inst.travel_between(anchor, a.anchor) +
                (success ? a.est.cost_success : a.est.cost_failure);
        ++depth;
        anchor = a.anchor;
        if (success) {
          succeeded.set(id);
          z = a.z_dprime;
        } else {
          failed.set(id);
          z = a.z_prime;
        }
        detail::available_actions(inst, anchor, z, false, failed, succeeded, avail);
      }
    }

    double value = tail;
    for (size_t i = path.size(); i-- > 0;) {
      value += path[i].cost;
      detail::tree_node& node = nodes[path[i].node];
      action_stats& s = node.stats[path[i].action];
      ++s.visits;
      s.mean += (value - s.mean) / s.visits;
      ++node.visits;
    }
    if (path.empty()) ++nodes[0].visits; // immediately terminal root

    if (cfg.trace) {
      *cfg.trace << "sim=" << sim << " path=";
      for (size_t i = 0; i < path.size(); ++i) {
        if (i) *cfg.trace << ',';
        *cfg.trace << path[i].action;
      }
      *cfg.trace << " cost=" << value << '\n';
    }
  }

  pouct_result out;
  out.root.assign(inst.actions.size() + 1, action_stats{});
  out.root_visits = nodes[0].visits;
  double best = cost_inf;
  for (int id : nodes[0].avail) {
    auto it = nodes[0].stats.find(id);
    if (it == nodes[0].stats.end()) continue;
    out.root[id] = it->second;
    if (it->second.mean < best) {
      best = it->second.mean;
      out.best = id;
      out.value = it->second.mean;
    }
  }
  return out;
}

using action_estimator =
    std::function<estimate_triple(const high_level_action&, const std::vector<frontier>&)>;

/* The abstract instance plus everything needed to map a chosen id back to
 * an executable move. */
struct built_instance {
  planning_instance inst;
  std::vector<frontier> frontiers;
  std::vector<high_level_action> actions; // parallel to inst.actions
  high_level_action finish;               // valid when finish_available
  bool finish_available = false;
};

namespace detail {

/* Plain known-space travel between anchor poses: obstacle-respecting,
 * label-blind. These are the chained-move distance estimates. */
inline std::vector<double> anchor_distances(const belief_map& b, cell_pos from,
                                            const std::vector<cell_pos>& anchors) {
  std::vector<int> dist(static_cast<size_t>(b.width) * b.height, -1);
  std::deque<cell_pos> queue;
  if (b.known_free(from)) {
    dist[b.index(from)] = 0;
    queue.push_back(from);
  }
  while (!queue.empty()) {
    cell_pos here = queue.front();
    queue.pop_front();
    for (auto& s : step4) {
      cell_pos next{here.col + s[0], here.row + s[1]};
      if (!b.known_free(next) || dist[b.index(next)] >= 0) continue;
      dist[b.index(next)] = dist[b.index(here)] + 1;
      queue.push_back(next);
    }
  }
  std::vector<double> out;
  for (cell_pos a : anchors) {
    int d = dist[b.index(a)];
    out.push_back(d < 0 ? cost_inf : d);
  }
  return out;
}

} // namespace detail

/* Builds the decision problem the search runs on from a mid-execution
 * product state with the enumeration already done: query the estimator
 * once per action and tabulate anchor travel and per-(anchor, state)
 * completion costs. */
inline built_instance build_instance(const belief_map& belief, const dfa& m, product_state from,
                                     std::vector<frontier> frontiers,
                                     const std::vector<high_level_action>& enumerated,
                                     const action_estimator& estimator, double fail_cost = 0) {
  built_instance out;
  out.frontiers = std::move(frontiers);
  cell_pos start = from.pose;

  planning_instance& inst = out.inst;
  inst.nz = m.state_count();
  inst.root_z = from.z;
  inst.accepting.assign(inst.nz, 0);
  for (int a : m.accepting) inst.accepting[a] = 1;
  inst.fail_cost = fail_cost > 0 ? fail_cost : 4.0 * (belief.width + belief.height);

  for (const high_level_action& a : enumerated) {
    if (a.is_finish()) {
      out.finish = a;
      out.finish_available = true;
      continue;
    }
    planner_action pa;
    pa.anchor = a.frontier_id;
    pa.z_prime = a.z_prime;
    pa.z_dprime = a.z_dprime;
    pa.d0 = a.d;
    pa.est = estimator(a, out.frontiers);
    inst.actions.push_back(pa);
    out.actions.push_back(a);
  }

  std::vector<cell_pos> anchors;
  anchors.push_back(start);
  for (const frontier& s : out.frontiers) anchors.push_back(s.subgoal);
  const int n = static_cast<int>(anchors.size());
  inst.travel.assign(n, {});
  for (int i = 0; i < n; ++i)
    inst.travel[i] = detail::anchor_distances(belief, anchors[i], anchors);

  inst.finish.assign(n, std::vector<double>(inst.nz, cost_inf));
  for (int i = 0; i < n; ++i)
    for (int z = 0; z < inst.nz; ++z) {
      if (!m.live(z)) continue;
      if (inst.accepting[z]) {
        inst.finish[i][z] = 0;
        continue;
      }
      pa_costs c = pa_dijkstra(belief, m, product_state{anchors[i], z});
      if (auto path = known_space_completion(c, m)) inst.finish[i][z] = path->total_cost;
    }
  return out;
}

/* Convenience form for planning from scratch at a start pose. */
inline built_instance build_instance(const belief_map& belief, const dfa& m, cell_pos start,
                                     const action_estimator& estimator, double fail_cost = 0) {
  product_state p0 = initial_product_state(belief, m, start);
  std::vector<frontier> frontiers = extract_frontiers(belief);
  pa_costs costs = pa_dijkstra(belief, m, p0);
  std::vector<high_level_action> enumerated = enumerate_actions(costs, m, frontiers);
  return build_instance(belief, m, p0, std::move(frontiers), enumerated, estimator, fail_cost);
}

/* Translates a search result back into a move; id == finish_id() returns
 * the known-space completion action. */
inline high_level_action action_for(const built_instance& b, int id) {
  if (id == b.inst.finish_id()) {
    if (!b.finish_available) fail(errc::no_action, "completion chosen but not available");
    return b.finish;
  }
  if (id < 0 || id >= static_cast<int>(b.actions.size()))
    fail(errc::no_action, "search returned no action");
  return b.actions[static_cast<size_t>(id)];
}

/* Contracted parallel mode: independent deterministic searches merged by
 * count-weighted averaging of root statistics. Results depend only on
 * (seed, workers), not on scheduling. */
inline pouct_result pouct_search_workers(const planning_instance& inst, planner_config cfg,
                                         int workers) {
  if (workers <= 0) fail(errc::param, "worker count must be positive");
  std::vector<pouct_result> parts(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      planner_config local = cfg;
      local.seed = mix_seed(cfg.seed, static_cast<uint64_t>(w));
      local.trace = nullptr;
      parts[w] = pouct_search(inst, local);
    });
  for (auto& t : pool) t.join();

  pouct_result out;
  out.root.assign(inst.actions.size() + 1, action_stats{});
  for (const auto& part : parts) {
    out.root_visits += part.root_visits;
    for (size_t id = 0; id < part.root.size(); ++id) {
      const action_stats& s = part.root[id];
      if (!s.visits) continue;
      action_stats& m = out.root[id];
      double total = m.mean * m.visits + s.mean * s.visits;
      m.visits += s.visits;
      m.mean = total / m.visits;
    }
  }
  double best = cost_inf;
  for (size_t id = 0; id < out.root.size(); ++id)
    if (out.root[id].visits && out.root[id].mean < best) {
      best = out.root[id].mean;
      out.best = static_cast<int>(id);
      out.value = best;
    }
  return out;
}

} // namespace potlp
