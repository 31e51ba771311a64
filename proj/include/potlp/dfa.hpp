#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "potlp/errors.hpp"
#include "potlp/formula.hpp"

namespace potlp {

inline formula progress(const formula& f, letter w);
inline formula progress_uncached(const formula& f, letter w);

namespace detail {

struct progress_memo {
  std::mutex mu;
  std::unordered_map<uint64_t, std::unordered_map<const formula::node*, formula>> per_letter;

  bool find(letter w, const formula::node* key, formula& out) {
    std::lock_guard<std::mutex> lock(mu);
    auto& map = per_letter[w];
    auto it = map.find(key);
    if (it == map.end()) return false;
    out = it->second;
    return true;
  }

  void put(letter w, const formula::node* key, const formula& value) {
    std::lock_guard<std::mutex> lock(mu);
    per_letter[w].emplace(key, value);
  }
};

inline progress_memo& progress_cache() {
  static progress_memo memo;
  return memo;
}

} // namespace detail

/* One-letter progression: rewrites a term into the obligation that must
 * hold over the remainder of the word after consuming w. The result is
 * returned in canonical form. Memoized on the shared term store, which
 * keeps repeated compilation workloads polynomial. */
inline formula progress(const formula& f, letter w) {
  formula cached;
  if (detail::progress_cache().find(w, f.raw(), cached)) return cached;
  formula result = progress_uncached(f, w);
  detail::progress_cache().put(w, f.raw(), result);
  return result;
}

inline formula progress_uncached(const formula& f, letter w) {
  switch (f.what()) {
    case formula::kind::tru: return formula::truth();
    case formula::kind::fls: return formula::falsity();
    case formula::kind::atom:
      return letter_has(w, f.prop()) ? formula::truth() : formula::falsity();
    case formula::kind::neg_atom:
      return letter_has(w, f.prop()) ? formula::falsity() : formula::truth();
    case formula::kind::conj:
    case formula::kind::disj: {
      /* Progress the maximal chain leaf-wise, then recanonicalize: leaf
       * residues can mix & under | arbitrarily, and only the simplify
       * pass restores the normal form the automaton states are keyed on. */
      const bool conj = f.is(formula::kind::conj);
      const formula::kind k = f.what();
      const formula absorber = conj ? formula::falsity() : formula::truth();
      std::vector<formula> leaves;
      detail::flatten(f, k, leaves);
      bool first = true;
      formula acc;
      for (const auto& leaf : leaves) {
        formula p = progress(leaf, w);
        if (p == absorber) return absorber;
        acc = first ? p : (conj ? formula::conj(acc, p) : formula::disj(acc, p));
        first = false;
      }
      return simplify(acc);
    }
    case formula::kind::next:
      return simplify(f.left());
    case formula::kind::until:
      return simplify(formula::disj(progress(f.right(), w),
                                    formula::conj(progress(f.left(), w), f)));
    case formula::kind::eventually:
      return simplify(formula::disj(progress(f.left(), w), f));
  }
  return f;
}

struct dfa_options {
  int max_states = 4096;
  // budget of freshly interned terms per compile; progression residues of a
  // pathological source can grow doubly exponentially, and this converts
  // such runaways into a clean error instead of unbounded work
  size_t max_new_nodes = 1000000;
};

/* Deterministic finite automaton over letters 0 .. 2^n - 1. States are
 * canonical progression residues of the source term, discovered in
 * breadth-first order, so state ids are reproducible. State 'true' (the
 * unique accepting state) and 'false' (the sink) are absorbing. */
struct dfa {
  alphabet sigma;
  std::vector<formula> states;
  std::vector<std::vector<int>> delta; // [state][letter] -> state
  int initial = 0;
  std::vector<int> accepting;    // sorted ids
  std::optional<int> sink;       // id of 'false' when reachable
  std::vector<int> accept_hops;  // edge distance to acceptance; -1 when unreachable

  int prop_count() const { return sigma.size(); }
  int letter_count() const { return 1 << sigma.size(); }
  int state_count() const { return static_cast<int>(states.size()); }

  int step(int z, letter w) const { return delta[z][w]; }

  bool is_accepting(int z) const {
    for (int a : accepting)
      if (a == z) return true;
    return false;
  }

  /* A state is live when acceptance is still reachable from it. */
  bool live(int z) const { return accept_hops[z] >= 0; }
};

inline dfa compile_dfa(const formula& f, const alphabet& sigma, dfa_options opts = {}) {
  if (sigma.size() > 16) fail(errc::param, "alphabet larger than 16 propositions");
  dfa out;
  out.sigma = sigma;
  const int letters = 1 << sigma.size();

  std::unordered_map<const formula::node*, int> ids;
  std::deque<int> queue;
  auto intern = [&](const formula& g) {
    auto it = ids.find(g.raw());
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(out.states.size());
    if (id >= opts.max_states)
      fail(errc::state_explosion,
           "automaton exceeds " + std::to_string(opts.max_states) + " states");
    ids.emplace(g.raw(), id);
    out.states.push_back(g);
    out.delta.emplace_back(letters, -1);
    queue.push_back(id);
    return id;
  };

  const size_t node_floor = formula::node_count();
  auto check_budget = [&] {
    if (formula::node_count() - node_floor > opts.max_new_nodes)
      fail(errc::state_explosion, "progression residues exceed the term growth budget");
  };

  out.initial = intern(simplify(f));
  while (!queue.empty()) {
    int z = queue.front();
    queue.pop_front();
    formula g = out.states[z];
    for (letter w = 0; w < static_cast<letter>(letters); ++w) {
      out.delta[z][w] = intern(progress(g, w));
      check_budget();
    }
  }

  for (int z = 0; z < out.state_count(); ++z) {
    if (out.states[z].is(formula::kind::tru)) out.accepting.push_back(z);
    if (out.states[z].is(formula::kind::fls)) out.sink = z;
  }

  // reverse breadth-first sweep from accepting states; hop = one edge
  out.accept_hops.assign(out.state_count(), -1);
  std::deque<int> bfs;
  for (int a : out.accepting) {
    out.accept_hops[a] = 0;
    bfs.push_back(a);
  }
  std::vector<std::vector<int>> preds(out.state_count());
  for (int z = 0; z < out.state_count(); ++z)
    for (letter w = 0; w < static_cast<letter>(letters); ++w) {
      int t = out.delta[z][w];
      if (t != z) preds[t].push_back(z);
    }
  while (!bfs.empty()) {
    int z = bfs.front();
    bfs.pop_front();
    for (int p : preds[z])
      if (out.accept_hops[p] < 0) {
        out.accept_hops[p] = out.accept_hops[z] + 1;
        bfs.push_back(p);
      }
  }
  return out;
}

inline bool accepts(const dfa& m, const word& w) {
  int z = m.initial;
  for (letter l : w) z = m.step(z, l);
  return m.is_accepting(z);
}

/* Letters that drive z to z2, in increasing bitmask order. */
inline std::vector<letter> guard(const dfa& m, int z, int z2) {
  std::vector<letter> out;
  for (letter w = 0; w < static_cast<letter>(m.letter_count()); ++w)
    if (m.step(z, w) == z2) out.push_back(w);
  return out;
}

inline std::optional<int> dist_to_accept(const dfa& m, int z) {
  if (m.accept_hops[z] < 0) return std::nullopt;
  return m.accept_hops[z];
}

/* Per-proposition requirement profile of an edge: +1 the proposition must
 * hold on every guard letter, -1 it must be absent from every guard
 * letter, 0 the guard admits both. */
struct transition_profile {
  std::vector<int8_t> stay; // guard(z', z')
  std::vector<int8_t> go;   // guard(z', z'')
};

namespace detail {

inline std::vector<int8_t> agreement(const dfa& m, const std::vector<letter>& letters) {
  std::vector<int8_t> out(m.prop_count(), 0);
  for (int p = 0; p < m.prop_count(); ++p) {
    bool in_all = true, in_none = true;
    for (letter w : letters) {
      if (letter_has(w, p)) in_none = false;
      else in_all = false;
    }
    out[p] = in_all ? 1 : (in_none ? -1 : 0);
  }
  return out;
}

} // namespace detail

inline transition_profile transition_encoding(const dfa& m, int z_from, int z_to) {
  std::vector<letter> stay_guard = guard(m, z_from, z_from);
  if (stay_guard.empty()) fail(errc::no_self_loop, "state cannot idle: " + std::to_string(z_from));
  std::vector<letter> go_guard = guard(m, z_from, z_to);
  if (go_guard.empty())
    fail(errc::no_such_transition,
         "no edge " + std::to_string(z_from) + " -> " + std::to_string(z_to));
  return transition_profile{detail::agreement(m, stay_guard), detail::agreement(m, go_guard)};
}

/* Text form: header, accepting ids, then every edge keyed by letter
 * bitmask (bit i = proposition with canonical index i). */
inline std::string serialize_dfa(const dfa& m) {
  std::ostringstream out;
  out << "dfa n=" << m.prop_count() << " states=" << m.state_count() << " init=" << m.initial
      << '\n';
  for (int a : m.accepting) out << "accept " << a << '\n';
  for (int z = 0; z < m.state_count(); ++z)
    for (letter w = 0; w < static_cast<letter>(m.letter_count()); ++w)
      out << "edge " << z << ' ' << w << ' ' << m.step(z, w) << '\n';
  return out.str();
}

inline std::string letter_to_string(const dfa& m, letter w) {
  std::string out = "{";
  bool first = true;
  for (int p = 0; p < m.prop_count(); ++p)
    if (letter_has(w, p)) {
      if (!first) out += ",";
      out += m.sigma.names[p];
      first = false;
    }
  return out + "}";
}

inline std::string dfa_to_dot(const dfa& m) {
  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (int z = 0; z < m.state_count(); ++z)
    out << "  " << z << " [shape=" << (m.is_accepting(z) ? "doublecircle" : "circle") << "];\n";
  out << "  __start -> " << m.initial << ";\n";
  for (int z = 0; z < m.state_count(); ++z)
    for (int t = 0; t < m.state_count(); ++t) {
      std::vector<letter> g = guard(m, z, t);
      if (g.empty()) continue;
      out << "  " << z << " -> " << t << " [label=\"";
      for (size_t i = 0; i < g.size(); ++i) {
        if (i) out << ", ";
        out << letter_to_string(m, g[i]);
      }
      out << "\"];\n";
    }
  out << "}\n";
  return out.str();
}

} // namespace potlp
