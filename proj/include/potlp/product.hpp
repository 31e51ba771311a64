#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "potlp/dfa.hpp"
#include "potlp/errors.hpp"
#include "potlp/frontier.hpp"
#include "potlp/grid.hpp"

namespace potlp {

struct product_state {
  cell_pos pose;
  int z = 0;

  bool operator==(const product_state& o) const { return pose == o.pose && z == o.z; }
};

struct pa_path {
  std::vector<product_state> states;
  int total_cost = 0; // one per grid move, so length of states minus one
};

/* Labels are consumed on arrival, so the start cell's label is applied to
 * the automaton exactly once, here. */
inline product_state initial_product_state(const belief_map& belief, const dfa& m,
                                           cell_pos pose) {
  if (!belief.known_free(pose)) fail(errc::param, "initial pose must be known free");
  int z = m.step(m.initial, static_cast<letter>(belief.labels_at(pose)));
  if (!m.live(z)) fail(errc::immediate_violation, "start cell label violates the task");
  return product_state{pose, z};
}

/* Single-source shortest paths over the known-space product graph,
 * explored lazily. Moves are unit cost; edges into dead automaton states
 * are never relaxed, so every stored path is violation free. Settling
 * order (cost, row, col, z) makes costs and parents deterministic. */
struct pa_costs {
  static constexpr int unreachable = std::numeric_limits<int>::max();

  int width = 0;
  int height = 0;
  int nz = 0;
  product_state source;
  std::vector<int> dist;   // packed (cell, z); `unreachable` when never settled
  std::vector<int> parent; // packed product index, -1 at the source / unsettled

  int pack(cell_pos c, int z) const { return (c.row * width + c.col) * nz + z; }
  int cost(cell_pos c, int z) const { return dist[pack(c, z)]; }
  bool reached(cell_pos c, int z) const { return cost(c, z) != unreachable; }

  std::optional<pa_path> path_to(cell_pos c, int z) const {
    if (!reached(c, z)) return std::nullopt;
    pa_path out;
    int at = pack(c, z);
    while (at != -1) {
      out.states.push_back(product_state{{at / nz % width, at / nz / width}, at % nz});
      at = parent[at];
    }
    std::reverse(out.states.begin(), out.states.end());
    out.total_cost = static_cast<int>(out.states.size()) - 1;
    return out;
  }
};

inline pa_costs pa_dijkstra(const belief_map& belief, const dfa& m, product_state from) {
  if (!belief.known_free(from.pose)) fail(errc::param, "source pose must be known free");
  pa_costs out;
  out.width = belief.width;
  out.height = belief.height;
  out.nz = m.state_count();
  out.source = from;
  out.dist.assign(static_cast<size_t>(out.width) * out.height * out.nz, pa_costs::unreachable);
  out.parent.assign(out.dist.size(), -1);

  using entry = std::tuple<int, int, int, int, int>; // cost, row, col, z, packed
  std::priority_queue<entry, std::vector<entry>, std::greater<entry>> open;
  int s = out.pack(from.pose, from.z);
  out.dist[s] = 0;
  open.emplace(0, from.pose.row, from.pose.col, from.z, s);

  while (!open.empty()) {
    auto [cost, row, col, z, packed] = open.top();
    open.pop();
    if (cost > out.dist[packed]) continue;
    cell_pos here{col, row};
    for (auto& d : detail::step4) {
      cell_pos next{col + d[0], row + d[1]};
      if (!belief.known_free(next)) continue;
      if (!edge_passable(belief.schema, belief.labels_at(here), belief.labels_at(next))) continue;
      int z2 = m.step(z, static_cast<letter>(belief.labels_at(next)));
      if (!m.live(z2)) continue;
      int target = out.pack(next, z2);
      if (cost + 1 < out.dist[target]) {
        out.dist[target] = cost + 1;
        out.parent[target] = packed;
        open.emplace(cost + 1, next.row, next.col, z2, target);
      }
    }
  }
  return out;
}

/* Automaton states attainable at a frontier's subgoal by traveling known
 * space, with the shortest such travel cost. */
inline std::vector<std::pair<int, int>> z_reach(const pa_costs& costs, const dfa& m,
                                                const frontier& s) {
  std::vector<std::pair<int, int>> out;
  for (int z = 0; z < m.state_count(); ++z)
    if (m.live(z) && costs.reached(s.subgoal, z)) out.emplace_back(z, costs.cost(s.subgoal, z));
  return out;
}

/* Cheapest known-space path that already finishes the task, if any. */
inline std::optional<pa_path> known_space_completion(const pa_costs& costs, const dfa& m) {
  int best = pa_costs::unreachable;
  cell_pos at{};
  int at_z = -1;
  for (int row = 0; row < costs.height; ++row)
    for (int col = 0; col < costs.width; ++col)
      for (int a : m.accepting) {
        int c = costs.cost({col, row}, a);
        if (c < best) {
          best = c;
          at = {col, row};
          at_z = a;
        }
      }
  if (at_z < 0) return std::nullopt;
  return costs.path_to(at, at_z);
}

inline std::vector<std::pair<int, int>> z_reach(const belief_map& belief, const dfa& m,
                                                product_state from, const frontier& s) {
  return z_reach(pa_dijkstra(belief, m, from), m, s);
}

inline std::optional<pa_path> known_space_completion(const belief_map& belief, const dfa& m,
                                                     product_state from) {
  return known_space_completion(pa_dijkstra(belief, m, from), m);
}

inline std::string format_pa_path(const pa_path& p) {
  std::ostringstream out;
  for (size_t i = 0; i < p.states.size(); ++i) {
    if (i) out << ' ';
    out << '(' << p.states[i].pose.col << ',' << p.states[i].pose.row << ',' << p.states[i].z
        << ')';
  }
  return out.str();
}

} // namespace potlp
