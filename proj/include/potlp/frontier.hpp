#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "potlp/grid.hpp"

namespace potlp {

struct frontier {
  int id = 0;
  std::vector<cell_pos> cells; // row-major order
  cell_pos subgoal;
};

namespace detail {

inline const int step4[4][2] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};

inline bool touches_unknown(const belief_map& b, cell_pos c) {
  for (auto& d : step4) {
    cell_pos n{c.col + d[0], c.row + d[1]};
    if (b.is_unknown(n)) return true;
  }
  return false;
}

} // namespace detail

/* Boundary cells are known-free cells 4-adjacent to unknown space,
 * grouped into 8-connected components. Each component's subgoal is its
 * cell nearest the centroid (ties by row, then col); components are
 * ordered by (min row, min col) and numbered in that order. */
inline std::vector<frontier> extract_frontiers(const belief_map& b) {
  std::vector<uint8_t> boundary(b.knowledge.size(), 0);
  for (int row = 0; row < b.height; ++row)
    for (int col = 0; col < b.width; ++col) {
      cell_pos c{col, row};
      if (b.known_free(c) && detail::touches_unknown(b, c)) boundary[b.index(c)] = 1;
    }

  std::vector<frontier> out;
  std::vector<uint8_t> seen(boundary.size(), 0);
  for (int row = 0; row < b.height; ++row)
    for (int col = 0; col < b.width; ++col) {
      int i = b.index({col, row});
      if (!boundary[i] || seen[i]) continue;
      frontier f;
      std::vector<cell_pos> stack{{col, row}};
      seen[i] = 1;
      while (!stack.empty()) {
        cell_pos c = stack.back();
        stack.pop_back();
        f.cells.push_back(c);
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            cell_pos n{c.col + dc, c.row + dr};
            if (!b.in_bounds(n)) continue;
            int j = b.index(n);
            if (boundary[j] && !seen[j]) {
              seen[j] = 1;
              stack.push_back(n);
            }
          }
      }
      std::sort(f.cells.begin(), f.cells.end(), [](cell_pos a, cell_pos c2) {
        return a.row != c2.row ? a.row < c2.row : a.col < c2.col;
      });
      double cx = 0, cy = 0;
      for (cell_pos c : f.cells) {
        cx += c.col;
        cy += c.row;
      }
      cx /= f.cells.size();
      cy /= f.cells.size();
      double best = -1;
      for (cell_pos c : f.cells) {
        double d2 = (c.col - cx) * (c.col - cx) + (c.row - cy) * (c.row - cy);
        if (best < 0 || d2 < best - 1e-12) {
          best = d2;
          f.subgoal = c;
        }
      }
      out.push_back(std::move(f));
    }

  std::sort(out.begin(), out.end(), [](const frontier& a, const frontier& b2) {
    cell_pos ka = a.cells.front(), kb = b2.cells.front();
    return ka.row != kb.row ? ka.row < kb.row : ka.col < kb.col;
  });
  for (size_t k = 0; k < out.size(); ++k) out[k].id = static_cast<int>(k);
  return out;
}

/* Known-space transition system: states are the known-free cells in
 * row-major order, edges are passable 4-neighbor moves of cost 1. */
struct lts {
  std::vector<cell_pos> states;
  std::vector<int> state_of_cell;            // grid index -> state id, -1 elsewhere
  std::vector<std::vector<int>> neighbors;   // sorted state ids
  std::vector<uint16_t> labels;              // per state

  int state_at(cell_pos c, const belief_map& b) const { return state_of_cell[b.index(c)]; }
};

inline lts lts_view(const belief_map& b) {
  lts g;
  g.state_of_cell.assign(b.knowledge.size(), -1);
  for (int row = 0; row < b.height; ++row)
    for (int col = 0; col < b.width; ++col) {
      cell_pos c{col, row};
      if (!b.known_free(c)) continue;
      g.state_of_cell[b.index(c)] = static_cast<int>(g.states.size());
      g.states.push_back(c);
      g.labels.push_back(b.labels_at(c));
    }
  g.neighbors.resize(g.states.size());
  for (size_t s = 0; s < g.states.size(); ++s) {
    cell_pos c = g.states[s];
    for (auto& d : detail::step4) {
      cell_pos n{c.col + d[0], c.row + d[1]};
      if (!b.known_free(n)) continue;
      if (!edge_passable(b.schema, b.labels_at(c), b.labels_at(n))) continue;
      g.neighbors[s].push_back(g.state_of_cell[b.index(n)]);
    }
    std::sort(g.neighbors[s].begin(), g.neighbors[s].end());
  }
  return g;
}

} // namespace potlp
