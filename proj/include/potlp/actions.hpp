#pragma once

#include <string>
#include <vector>

#include "potlp/product.hpp"

namespace potlp {

/* One frontier-directed attempt: travel known space to frontier s at
 * automaton state z', then push into unknown space until the automaton
 * moves to z'' (or the attempt fails). Finish completes the task entirely
 * inside known space. */
struct high_level_action {
  enum class kind : uint8_t { explore, finish };

  kind k = kind::explore;
  int frontier_id = -1; // explore only
  int z_prime = -1;     // explore only
  int z_dprime = -1;    // explore only
  int d = 0;            // known-space travel (or completion) cost
  transition_profile encoding; // explore only

  bool is_finish() const { return k == kind::finish; }

  bool same_move(const high_level_action& o) const {
    if (k != o.k) return false;
    if (k == kind::finish) return true;
    return frontier_id == o.frontier_id && z_prime == o.z_prime && z_dprime == o.z_dprime;
  }
};

inline std::string format_action(const high_level_action& a) {
  if (a.is_finish()) return "finish D=" + std::to_string(a.d);
  return "s" + std::to_string(a.frontier_id) + ":z'" + std::to_string(a.z_prime) + "->z''" +
         std::to_string(a.z_dprime) + " D=" + std::to_string(a.d);
}

/* States one guarded edge away from zPrime, excluding the self loop and
 * anything that can no longer reach acceptance. */
inline std::vector<int> z_next(const dfa& m, int z_prime) {
  std::vector<int> out;
  for (int z2 = 0; z2 < m.state_count(); ++z2) {
    if (z2 == z_prime || !m.live(z2)) continue;
    bool edge = false;
    for (int w = 0; w < m.letter_count() && !edge; ++w)
      if (m.delta[z_prime][w] == z2) edge = true;
    if (edge) out.push_back(z2);
  }
  return out;
}

/* The root action set: every (frontier, z', z'') whose z' is attainable in
 * known space and whose encodings exist, ordered by (frontier, z', z''),
 * then Finish when the task can already be completed in known space. */
inline std::vector<high_level_action> enumerate_actions(const pa_costs& costs, const dfa& m,
                                                        const std::vector<frontier>& frontiers) {
  std::vector<high_level_action> out;
  for (const frontier& s : frontiers) {
    for (auto [zp, travel] : z_reach(costs, m, s)) {
      if (guard(m, zp, zp).empty()) continue; // no self loop: cannot dwell while exploring
      for (int zd : z_next(m, zp)) {
        high_level_action a;
        a.k = high_level_action::kind::explore;
        a.frontier_id = s.id;
        a.z_prime = zp;
        a.z_dprime = zd;
        a.d = travel;
        a.encoding = transition_encoding(m, zp, zd);
        out.push_back(std::move(a));
      }
    }
  }
  if (auto done = known_space_completion(costs, m)) {
    high_level_action a;
    a.k = high_level_action::kind::finish;
    a.d = done->total_cost;
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<high_level_action> enumerate_actions(const belief_map& belief, const dfa& m,
                                                        product_state start,
                                                        const std::vector<frontier>& frontiers) {
  return enumerate_actions(pa_dijkstra(belief, m, start), m, frontiers);
}

} // namespace potlp
