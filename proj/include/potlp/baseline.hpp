#pragma once

#include <tuple>

#include "potlp/actions.hpp"

namespace potlp {

/* Estimator-free comparison rule: complete the task in known space when
 * possible, otherwise head for the nearest frontier that makes automaton
 * progress, preferring targets closer to acceptance. Remaining fields make
 * the order total so the choice is deterministic. */
inline high_level_action baseline_select(const dfa& m, const std::vector<high_level_action>& actions) {
  if (actions.empty()) fail(errc::no_action, "baseline called with no actions");
  const high_level_action* best = nullptr;
  for (const high_level_action& a : actions) {
    if (a.is_finish()) return a;
    auto rank = [&](const high_level_action& x) {
      return std::make_tuple(x.d, m.accept_hops[x.z_dprime], x.frontier_id, x.z_prime, x.z_dprime);
    };
    if (!best || rank(a) < rank(*best)) best = &a;
  }
  return *best;
}

} // namespace potlp
