#pragma once

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "potlp/actions.hpp"

namespace potlp {

/* Per-action belief over the outcome of exploring: chance of achieving the
 * intended transition, expected travel beyond the subgoal when it works,
 * and expected wasted travel when it does not. */
struct estimate_triple {
  double p_success = 0.5;
  double cost_success = 0;
  double cost_failure = 0;
};

inline constexpr double estimate_epsilon = 1e-3;

/* Non-oracle estimators keep probabilities away from 0/1 and costs
 * non-negative so downstream expectations stay well conditioned. */
inline estimate_triple clamp_estimate(estimate_triple t) {
  t.p_success = std::min(1.0 - estimate_epsilon, std::max(estimate_epsilon, t.p_success));
  t.cost_success = std::max(0.0, t.cost_success);
  t.cost_failure = std::max(0.0, t.cost_failure);
  return t;
}

/* Feature layout, fixed order: the action's stay and go encodings (one
 * value per proposition), known-space travel distance, frontier size, one
 * nearby-count per cue, and the amount of nearby unknown space. Raw
 * values; normalization happens inside the trained model. */
inline std::vector<std::string> feature_names(const map_schema& schema) {
  std::vector<std::string> names;
  for (const auto& p : schema.sigma.names) names.push_back("stay_" + p);
  for (const auto& p : schema.sigma.names) names.push_back("go_" + p);
  names.push_back("dist");
  names.push_back("frontier_size");
  for (const auto& c : schema.cues.names) names.push_back("cue_" + c);
  names.push_back("unknown_r5");
  return names;
}

inline std::vector<double> featurize(const belief_map& belief, const high_level_action& a,
                                     const std::vector<frontier>& frontiers) {
  if (a.is_finish()) fail(errc::param, "only explore actions are featurized");
  const frontier& s = frontiers.at(a.frontier_id);
  std::vector<double> out;
  for (int8_t v : a.encoding.stay) out.push_back(v);
  for (int8_t v : a.encoding.go) out.push_back(v);
  out.push_back(a.d);
  out.push_back(static_cast<double>(s.cells.size()));
  for (int cue = 0; cue < belief.schema.cues.size(); ++cue) {
    int count = 0;
    for (int dr = -3; dr <= 3; ++dr)
      for (int dc = -3; dc <= 3; ++dc) {
        cell_pos c{s.subgoal.col + dc, s.subgoal.row + dr};
        if (!belief.in_bounds(c) || belief.at(c) == cell_knowledge::unknown) continue;
        if (letter_has(belief.cue_bits[belief.index(c)], cue)) ++count;
      }
    out.push_back(count);
  }
  int unknown = 0;
  for (int dr = -5; dr <= 5; ++dr)
    for (int dc = -5; dc <= 5; ++dc) {
      cell_pos c{s.subgoal.col + dc, s.subgoal.row + dr};
      if (belief.in_bounds(c) && belief.at(c) == cell_knowledge::unknown) ++unknown;
    }
  out.push_back(unknown);
  return out;
}

/* Ground-truth outcome of an explore action, computed by flooding the
 * unknown region behind the subgoal. Traversal stays on truth-free cells
 * that keep the automaton in z' (the self-loop guard); cells that fire the
 * intended z'->z'' transition are recorded as triggers and not expanded.
 * Success cost is the distance to the nearest trigger; failure cost is a
 * sweep-and-return proxy, twice the safe reachable unknown region. */
inline estimate_triple oracle_estimate(const grid_map& truth, const belief_map& belief,
                                       const dfa& m, const high_level_action& a,
                                       const std::vector<frontier>& frontiers) {
  if (a.is_finish()) fail(errc::param, "only explore actions are estimated");
  const cell_pos subgoal = frontiers.at(a.frontier_id).subgoal;
  const auto stay_letters = guard(m, a.z_prime, a.z_prime);
  const auto go_letters = guard(m, a.z_prime, a.z_dprime);
  auto in_stay = [&](letter w) {
    return std::find(stay_letters.begin(), stay_letters.end(), w) != stay_letters.end();
  };
  auto in_go = [&](letter w) {
    return std::find(go_letters.begin(), go_letters.end(), w) != go_letters.end();
  };
  auto in_domain = [&](cell_pos c) {
    return truth.free_at(c) &&
           (c == subgoal || belief.at(c) == cell_knowledge::unknown);
  };

  std::vector<int> dist(truth.occupancy.size(), -1);
  std::deque<cell_pos> queue;
  dist[truth.index(subgoal)] = 0;
  queue.push_back(subgoal);
  int swept_unknown = 0;
  int nearest_trigger = -1;
  while (!queue.empty()) {
    cell_pos here = queue.front();
    queue.pop_front();
    int d = dist[truth.index(here)];
    for (auto& step : detail::step4) {
      cell_pos next{here.col + step[0], here.row + step[1]};
      if (!in_domain(next) || dist[truth.index(next)] >= 0) continue;
      if (!edge_passable(truth.schema, truth.labels_at(here), truth.labels_at(next))) continue;
      letter l = static_cast<letter>(truth.labels_at(next));
      if (in_go(l)) {
        dist[truth.index(next)] = d + 1;
        if (nearest_trigger < 0) nearest_trigger = d + 1;
        continue; // trigger reached; the transition fires, no need to expand
      }
      if (!in_stay(l)) continue; // would drive the automaton somewhere else
      dist[truth.index(next)] = d + 1;
      ++swept_unknown;
      queue.push_back(next);
    }
  }

  estimate_triple t;
  if (nearest_trigger >= 0) {
    t.p_success = 1;
    t.cost_success = nearest_trigger;
    t.cost_failure = 0;
  } else {
    t.p_success = 0;
    t.cost_success = 0;
    t.cost_failure = 2.0 * swept_unknown;
  }
  return t;
}

struct heuristic_config {
  double p0 = 0.5;
  double alpha = 1.0;
};

/* Uninformed reference estimator: a coin-flip success belief and costs
 * that scale with how much of the world is still unexplored. */
inline estimate_triple heuristic_estimate(const belief_map& belief, const high_level_action&,
                                          heuristic_config cfg = {}) {
  double spread = cfg.alpha * std::sqrt(static_cast<double>(belief.unknown_count()));
  return clamp_estimate(estimate_triple{cfg.p0, spread, 2 * spread});
}

} // namespace potlp
