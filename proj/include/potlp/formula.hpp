#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "potlp/errors.hpp"

namespace potlp {

/* Alphabet of atomic propositions. Canonical index order is lexicographic
 * over names regardless of declaration order, so letter bitmasks and
 * automaton layouts are reproducible across runs. */
struct alphabet {
  std::vector<std::string> names; // sorted, unique

  static alphabet from_names(std::vector<std::string> raw) {
    std::sort(raw.begin(), raw.end());
    for (size_t i = 1; i < raw.size(); ++i)
      if (raw[i] == raw[i - 1]) fail(errc::param, "duplicate proposition: " + raw[i]);
    for (const auto& name : raw) {
      if (name.empty()) fail(errc::param, "empty proposition name");
      for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
          fail(errc::param, "bad proposition name: " + name);
    }
    if (raw.size() > 16) fail(errc::param, "alphabet larger than 16 propositions");
    return alphabet{std::move(raw)};
  }

  int size() const { return static_cast<int>(names.size()); }

  int index_of(const std::string& name) const {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return -1;
    return static_cast<int>(it - names.begin());
  }
};

/* A letter is the set of propositions true on one cell / at one instant,
 * packed as a bitmask over canonical indices. */
using letter = uint32_t;
using word = std::vector<letter>;

inline bool letter_has(letter w, int prop) { return (w >> prop) & 1u; }

/* Immutable hash-consed term. Structurally equal terms share one node, so
 * equality is a pointer test and rewriting workloads stay polynomial even
 * when naive trees would blow up. Negation appears only directly on atoms. */
class formula {
public:
  enum class kind : uint8_t {
    tru,
    fls,
    atom,
    neg_atom,
    next,
    eventually,
    until,
    conj,
    disj,
  };

  struct node {
    kind k;
    int prop;
    const node* a;
    const node* b;
    uint64_t hash; // structural, identical across runs
  };

  formula() : formula(truth()) {}

  static formula truth() { return formula(intern(kind::tru, -1, nullptr, nullptr)); }
  static formula falsity() { return formula(intern(kind::fls, -1, nullptr, nullptr)); }
  static formula atom(int prop) { return formula(intern(kind::atom, prop, nullptr, nullptr)); }
  static formula neg_atom(int prop) { return formula(intern(kind::neg_atom, prop, nullptr, nullptr)); }
  static formula next(formula f) { return formula(intern(kind::next, -1, f.node_, nullptr)); }
  static formula eventually(formula f) { return formula(intern(kind::eventually, -1, f.node_, nullptr)); }
  static formula until(formula l, formula r) { return formula(intern(kind::until, -1, l.node_, r.node_)); }
  static formula conj(formula l, formula r) { return formula(intern(kind::conj, -1, l.node_, r.node_)); }
  static formula disj(formula l, formula r) { return formula(intern(kind::disj, -1, l.node_, r.node_)); }

  kind what() const { return node_->k; }
  int prop() const { return node_->prop; }
  formula left() const { return formula(node_->a); }
  formula right() const { return formula(node_->b); }
  bool is(kind k) const { return node_->k == k; }
  const node* raw() const { return node_; }

  bool operator==(const formula& o) const { return node_ == o.node_; }
  bool operator!=(const formula& o) const { return node_ != o.node_; }
  bool operator<(const formula& o) const { return compare(*this, o) < 0; }

  /* Total syntactic order driving commutativity normalization. Purely
   * structural, so it is identical across runs and processes. */
  static int compare(const formula& x, const formula& y) { return compare_nodes(x.node_, y.node_); }

  /* Total interned terms so far; deltas of this bound rewriting work. */
  static size_t node_count() {
    store& s = global_store();
    std::lock_guard<std::mutex> lock(s.mu);
    return s.nodes.size();
  }

  /* Unambiguous key string; useful for debugging and golden files. */
  std::string key() const {
    std::string out;
    key_into(node_, out);
    return out;
  }

  std::string to_string(const alphabet& sigma) const { return print(node_, sigma, 0); }

private:
  explicit formula(const node* n) : node_(n) {}

  /* Hash-first keeps sorting cheap on heavily shared terms; the structural
   * tie-break recursion stays rare (hash collisions) and always separates
   * distinct nodes, so this is a total order with 0 only on identity. */
  static int compare_nodes(const node* x, const node* y) {
    if (x == y) return 0;
    if (x->hash != y->hash) return x->hash < y->hash ? -1 : 1;
    if (x->k != y->k) return static_cast<int>(x->k) < static_cast<int>(y->k) ? -1 : 1;
    if (x->prop != y->prop) return x->prop < y->prop ? -1 : 1;
    if (x->a != y->a) {
      int c = compare_nodes(x->a, y->a);
      if (c != 0) return c;
    }
    if (x->b != y->b) return compare_nodes(x->b, y->b);
    return 0;
  }

  struct intern_key {
    kind k;
    int prop;
    const node* a;
    const node* b;
    bool operator==(const intern_key& o) const {
      return k == o.k && prop == o.prop && a == o.a && b == o.b;
    }
  };

  struct intern_hash {
    size_t operator()(const intern_key& key) const {
      uint64_t h = 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(key.k);
      h = h * 0x100000001b3ULL ^ static_cast<uint64_t>(key.prop + 1);
      h = h * 0x100000001b3ULL ^ reinterpret_cast<uintptr_t>(key.a);
      h = h * 0x100000001b3ULL ^ reinterpret_cast<uintptr_t>(key.b);
      return static_cast<size_t>(h ^ (h >> 29));
    }
  };

  struct store {
    std::mutex mu;
    std::deque<node> nodes;
    std::unordered_map<intern_key, const node*, intern_hash> table;
  };

  static store& global_store() {
    static store s;
    return s;
  }

  static uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  static uint64_t structural_hash(kind k, int prop, const node* a, const node* b) {
    uint64_t h = mix64(0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(k));
    h = mix64(h ^ static_cast<uint64_t>(static_cast<int64_t>(prop) + 7));
    if (a) h = mix64(h ^ a->hash);
    if (b) h = mix64((h + 0x8000000080001105ULL) ^ b->hash);
    return h;
  }

  static const node* intern(kind k, int prop, const node* a, const node* b) {
    store& s = global_store();
    std::lock_guard<std::mutex> lock(s.mu);
    intern_key key{k, prop, a, b};
    auto it = s.table.find(key);
    if (it != s.table.end()) return it->second;
    s.nodes.push_back(node{k, prop, a, b, structural_hash(k, prop, a, b)});
    const node* fresh = &s.nodes.back();
    s.table.emplace(key, fresh);
    return fresh;
  }

  static void key_into(const node* n, std::string& out) {
    switch (n->k) {
      case kind::tru: out += 'T'; return;
      case kind::fls: out += 'F'; return;
      case kind::atom:
        out += 'a';
        out += std::to_string(n->prop);
        return;
      case kind::neg_atom:
        out += 'n';
        out += std::to_string(n->prop);
        return;
      case kind::next:
        out += "X(";
        key_into(n->a, out);
        out += ')';
        return;
      case kind::eventually:
        out += "E(";
        key_into(n->a, out);
        out += ')';
        return;
      case kind::until:
        out += "U(";
        key_into(n->a, out);
        out += ',';
        key_into(n->b, out);
        out += ')';
        return;
      case kind::conj:
        out += "&(";
        key_into(n->a, out);
        out += ',';
        key_into(n->b, out);
        out += ')';
        return;
      case kind::disj:
        out += "|(";
        key_into(n->a, out);
        out += ',';
        key_into(n->b, out);
        out += ')';
        return;
    }
  }

  // precedence levels: | lowest, then &, then U, then unary
  static std::string print(const node* n, const alphabet& sigma, int parent_level) {
    auto wrap = [&](int level, std::string body) {
      if (level < parent_level) return "(" + std::move(body) + ")";
      return body;
    };
    switch (n->k) {
      case kind::tru: return "true";
      case kind::fls: return "false";
      case kind::atom: return sigma.names.at(n->prop);
      case kind::neg_atom: return "!" + sigma.names.at(n->prop);
      case kind::next: return "X " + print(n->a, sigma, 4);
      case kind::eventually: return "F " + print(n->a, sigma, 4);
      case kind::until: return wrap(3, print(n->a, sigma, 4) + " U " + print(n->b, sigma, 3));
      case kind::conj: return wrap(2, print(n->a, sigma, 3) + " & " + print(n->b, sigma, 2));
      case kind::disj: return wrap(1, print(n->a, sigma, 2) + " | " + print(n->b, sigma, 1));
    }
    return "";
  }

  const node* node_;
};

namespace detail {

/* Leaves of the maximal same-kind chain rooted at f, left to right.
 * Iterative so chain length never costs stack depth. */
inline void flatten(const formula& f, formula::kind k, std::vector<formula>& out) {
  std::vector<formula> stack{f};
  while (!stack.empty()) {
    formula cur = stack.back();
    stack.pop_back();
    if (cur.is(k)) {
      stack.push_back(cur.right());
      stack.push_back(cur.left());
    } else {
      out.push_back(cur);
    }
  }
}

// sorted, deduplicated children rebuilt as a right-nested chain
inline formula rebuild(std::vector<formula>& parts, formula::kind k, const formula& unit) {
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  if (parts.empty()) return unit;
  formula acc = parts.back();
  for (size_t i = parts.size() - 1; i-- > 0;)
    acc = k == formula::kind::conj ? formula::conj(parts[i], acc) : formula::disj(parts[i], acc);
  return acc;
}

/* The boolean layer is canonicalized to reduced disjunctive normal form:
 * an antichain of clauses, each a sorted set of non-boolean literals read
 * conjunctively. Temporal progression only ever composes a fixed set of
 * subterm literals with & and |, so this canonical form caps the number
 * of distinct residues and keeps automaton construction finite. */
using dnf_clause = std::vector<formula>; // sorted, unique literals

// q's literals are a subset of p's, so p is redundant: q | (q & r) = q
inline bool clause_subsumes(const dnf_clause& q, const dnf_clause& p) {
  return std::includes(p.begin(), p.end(), q.begin(), q.end());
}

// an atom conjoined with its own negation can never hold
inline bool clause_contradictory(const dnf_clause& c) {
  for (const formula& lit : c) {
    if (!lit.is(formula::kind::atom)) continue;
    for (const formula& other : c)
      if (other.is(formula::kind::neg_atom) && other.prop() == lit.prop()) return true;
  }
  return false;
}

// clause list of an already-canonical formula; true is the empty clause
inline void dnf_clauses_of(const formula& f, std::vector<dnf_clause>& out) {
  if (f == formula::falsity()) return;
  if (f == formula::truth()) {
    out.push_back({});
    return;
  }
  std::vector<formula> alts;
  flatten(f, formula::kind::disj, alts);
  for (const formula& alt : alts) {
    dnf_clause c;
    flatten(alt, formula::kind::conj, c);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    out.push_back(std::move(c));
  }
}

// drop contradictory and subsumed clauses; result holds only minimal clauses
inline void reduce_antichain(std::vector<dnf_clause>& cs) {
  cs.erase(std::remove_if(cs.begin(), cs.end(), clause_contradictory), cs.end());
  std::sort(cs.begin(), cs.end(), [](const dnf_clause& a, const dnf_clause& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<dnf_clause> kept;
  for (dnf_clause& c : cs) {
    bool redundant = false;
    for (const dnf_clause& k : kept)
      if (clause_subsumes(k, c)) {
        redundant = true;
        break;
      }
    if (!redundant) kept.push_back(std::move(c));
  }
  cs = std::move(kept);
}

inline formula dnf_rebuild(std::vector<dnf_clause>& cs) {
  if (cs.empty()) return formula::falsity();
  std::vector<formula> alts;
  for (dnf_clause& c : cs) alts.push_back(rebuild(c, formula::kind::conj, formula::truth()));
  return rebuild(alts, formula::kind::disj, formula::falsity());
}

struct node_memo {
  std::mutex mu;
  std::unordered_map<const formula::node*, formula> map;

  bool find(const formula::node* key, formula& out) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = map.find(key);
    if (it == map.end()) return false;
    out = it->second;
    return true;
  }

  void put(const formula::node* key, const formula& value) {
    std::lock_guard<std::mutex> lock(mu);
    map.emplace(key, value);
  }
};

inline node_memo& simplify_memo() {
  static node_memo memo;
  return memo;
}

} // namespace detail

/* Canonicalization: unit/absorbing laws for the boolean connectives,
 * duplicate removal, a sorted normal order for chains of & and |, and
 * constant folding through the temporal connectives. The temporal laws
 * follow the strict finite-trace reading: "p U true" and "F true" both
 * mean "some position exists", so neither collapses to true, while any
 * connective whose obligation is false can never find a witness.
 * Idempotent; canonical forms are what the automaton states are keyed on. */
inline formula simplify(const formula& f) {
  formula cached;
  if (detail::simplify_memo().find(f.raw(), cached)) return cached;
  formula result = f;
  switch (f.what()) {
    case formula::kind::tru:
    case formula::kind::fls:
    case formula::kind::atom:
    case formula::kind::neg_atom:
      break;
    case formula::kind::next: {
      formula a = simplify(f.left());
      result = a == formula::falsity() ? formula::falsity() : formula::next(a);
      break;
    }
    case formula::kind::eventually: {
      formula a = simplify(f.left());
      if (a == formula::falsity())
        result = formula::falsity();
      else if (a.is(formula::kind::eventually))
        result = a;
      else
        result = formula::eventually(a);
      break;
    }
    case formula::kind::until: {
      formula l = simplify(f.left());
      formula r = simplify(f.right());
      if (r == formula::falsity())
        result = formula::falsity();
      else if (r == formula::truth())
        result = formula::eventually(formula::truth());
      else if (l == formula::falsity() || l == r)
        result = r;
      else if (l == formula::truth())
        result = r.is(formula::kind::eventually) ? r : formula::eventually(r);
      else
        result = formula::until(l, r);
      break;
    }
    case formula::kind::conj: {
      /* Clause product over the maximal chain, reduced as it grows so
       * intermediate antichains never hold redundant clauses. */
      std::vector<formula> leaves;
      detail::flatten(f, formula::kind::conj, leaves);
      std::vector<detail::dnf_clause> acc = {{}};
      for (const auto& leaf : leaves) {
        std::vector<detail::dnf_clause> child;
        detail::dnf_clauses_of(simplify(leaf), child);
        std::vector<detail::dnf_clause> next;
        for (const auto& a : acc)
          for (const auto& b : child) {
            detail::dnf_clause merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            std::sort(merged.begin(), merged.end());
            merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
            next.push_back(std::move(merged));
          }
        detail::reduce_antichain(next);
        acc = std::move(next);
        if (acc.empty()) break;
      }
      result = detail::dnf_rebuild(acc);
      break;
    }
    case formula::kind::disj: {
      std::vector<formula> leaves;
      detail::flatten(f, formula::kind::disj, leaves);
      std::vector<detail::dnf_clause> acc;
      for (const auto& leaf : leaves) detail::dnf_clauses_of(simplify(leaf), acc);
      detail::reduce_antichain(acc);
      result = detail::dnf_rebuild(acc);
      break;
    }
  }
  detail::simplify_memo().put(f.raw(), result);
  if (result != f) detail::simplify_memo().put(result.raw(), result);
  return result;
}

} // namespace potlp
