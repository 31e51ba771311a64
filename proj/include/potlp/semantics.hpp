#pragma once

#include <cstddef>

#include "potlp/formula.hpp"

namespace potlp {

namespace detail {

/* Strict finite-trace satisfaction over w[0..len) at position i. Atoms and
 * their negations demand the position to exist; X consumes a position;
 * U / F demand a witness inside the evaluated prefix. Evaluated directly
 * on the term, with no automaton involved. */
inline bool strong_sat(const formula& f, const word& w, size_t i, size_t len) {
  switch (f.what()) {
    case formula::kind::tru: return true;
    case formula::kind::fls: return false;
    case formula::kind::atom: return i < len && letter_has(w[i], f.prop());
    case formula::kind::neg_atom: return i < len && !letter_has(w[i], f.prop());
    case formula::kind::conj:
      return strong_sat(f.left(), w, i, len) && strong_sat(f.right(), w, i, len);
    case formula::kind::disj:
      return strong_sat(f.left(), w, i, len) || strong_sat(f.right(), w, i, len);
    case formula::kind::next: return i < len && strong_sat(f.left(), w, i + 1, len);
    case formula::kind::until:
      for (size_t j = i; j < len; ++j) {
        if (strong_sat(f.right(), w, j, len)) return true;
        if (!strong_sat(f.left(), w, j, len)) return false;
      }
      return false;
    case formula::kind::eventually:
      for (size_t j = i; j < len; ++j)
        if (strong_sat(f.left(), w, j, len)) return true;
      return false;
  }
  return false;
}

} // namespace detail

/* Good-prefix check: true when some prefix of the word already settles
 * the term. Negation never applies above atoms, so satisfaction is
 * monotone in the prefix length and each prefix needs one strict pass. */
inline bool eval_scltl(const formula& f, const word& w) {
  for (size_t len = 0; len <= w.size(); ++len)
    if (detail::strong_sat(f, w, 0, len)) return true;
  return false;
}

} // namespace potlp
