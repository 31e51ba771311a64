#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "potlp/errors.hpp"
#include "potlp/formula.hpp"

namespace potlp {

struct cell_pos {
  int col = 0;
  int row = 0;

  bool operator==(const cell_pos& o) const { return col == o.col && row == o.row; }
  bool operator!=(const cell_pos& o) const { return !(*this == o); }
};

/* Shared vocabulary of a scenario: propositions that may label cells,
 * observable cue names, and which propositions make a cell block passage
 * between two such cells. */
struct map_schema {
  alphabet sigma;
  alphabet cues;
  uint16_t blockers = 0; // bitmask over sigma indices

  bool blocks(uint16_t labels) const { return (labels & blockers) != 0; }
};

struct grid_map {
  int width = 0;
  int height = 0;
  map_schema schema;
  std::vector<uint8_t> occupancy; // 0 free, 1 obstacle
  std::vector<uint16_t> labels;   // bitmask over sigma, free cells only
  std::vector<uint16_t> cue_bits; // bitmask over cues, free cells only
  cell_pos start;

  int index(cell_pos c) const { return c.row * width + c.col; }
  bool in_bounds(cell_pos c) const {
    return c.col >= 0 && c.col < width && c.row >= 0 && c.row < height;
  }
  bool free_at(cell_pos c) const { return in_bounds(c) && occupancy[index(c)] == 0; }
  uint16_t labels_at(cell_pos c) const { return labels[index(c)]; }
};

enum class cell_knowledge : uint8_t { unknown = 0, known_free = 1, known_obstacle = 2 };

/* Partial picture of the world built up from observations. Labels and
 * cues are only meaningful on known cells, where they equal the ground
 * truth (sensing is perfect within line of sight). */
struct belief_map {
  int width = 0;
  int height = 0;
  map_schema schema;
  std::vector<cell_knowledge> knowledge;
  std::vector<uint16_t> labels;
  std::vector<uint16_t> cue_bits;

  int index(cell_pos c) const { return c.row * width + c.col; }
  bool in_bounds(cell_pos c) const {
    return c.col >= 0 && c.col < width && c.row >= 0 && c.row < height;
  }
  cell_knowledge at(cell_pos c) const { return knowledge[index(c)]; }
  bool known_free(cell_pos c) const { return in_bounds(c) && at(c) == cell_knowledge::known_free; }
  bool is_unknown(cell_pos c) const { return in_bounds(c) && at(c) == cell_knowledge::unknown; }
  uint16_t labels_at(cell_pos c) const { return labels[index(c)]; }

  int unknown_count() const {
    int n = 0;
    for (cell_knowledge k : knowledge)
      if (k == cell_knowledge::unknown) ++n;
    return n;
  }
};

inline belief_map empty_belief(const grid_map& truth) {
  belief_map b;
  b.width = truth.width;
  b.height = truth.height;
  b.schema = truth.schema;
  b.knowledge.assign(static_cast<size_t>(truth.width) * truth.height, cell_knowledge::unknown);
  b.labels.assign(b.knowledge.size(), 0);
  b.cue_bits.assign(b.knowledge.size(), 0);
  return b;
}

inline belief_map full_belief(const grid_map& truth) {
  belief_map b = empty_belief(truth);
  for (int i = 0; i < truth.width * truth.height; ++i) {
    b.knowledge[i] =
        truth.occupancy[i] ? cell_knowledge::known_obstacle : cell_knowledge::known_free;
    b.labels[i] = truth.labels[i];
    b.cue_bits[i] = truth.cue_bits[i];
  }
  return b;
}

/* Movement rule shared by search, execution, and sweep estimates: both
 * endpoints free, and never between two cells that each carry a
 * passage-blocking label (a blocking cell may be entered and left, but a
 * blocked region cannot be crossed). */
inline bool edge_passable(const map_schema& schema, uint16_t labels_from, uint16_t labels_to) {
  return !(schema.blocks(labels_from) && schema.blocks(labels_to));
}

namespace detail {

/* Cells strictly between two endpoints on the Bresenham segment. */
inline void ray_between(cell_pos a, cell_pos b, std::vector<cell_pos>& out) {
  out.clear();
  int dx = std::abs(b.col - a.col), dy = -std::abs(b.row - a.row);
  int sx = a.col < b.col ? 1 : -1, sy = a.row < b.row ? 1 : -1;
  int err = dx + dy;
  cell_pos cur = a;
  while (true) {
    if (cur == b) break;
    if (cur != a) out.push_back(cur);
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      cur.col += sx;
    }
    if (e2 <= dx) {
      err += dx;
      cur.row += sy;
    }
  }
}

} // namespace detail

/* True when the target cell is within the sensing radius and no strictly
 * intermediate cell on the ray is an obstacle; obstacle cells themselves
 * are visible at the boundary but opaque behind. */
inline bool visible_from(const grid_map& truth, cell_pos eye, cell_pos target, int radius) {
  int dc = target.col - eye.col, dr = target.row - eye.row;
  if (dc * dc + dr * dr > radius * radius) return false;
  std::vector<cell_pos> between;
  detail::ray_between(eye, target, between);
  for (cell_pos c : between)
    if (truth.occupancy[truth.index(c)]) return false;
  return true;
}

/* Reveal everything visible from the pose. Knowledge only grows; returns
 * newly revealed cells in row-major order. A radius of at least
 * width + height is treated as unlimited full-map sensing. */
inline std::vector<cell_pos> reveal(belief_map& belief, const grid_map& truth, cell_pos pose,
                                    int radius) {
  if (!truth.free_at(pose)) fail(errc::param, "reveal pose must be a free cell");
  std::vector<cell_pos> fresh;
  bool unlimited = radius >= truth.width + truth.height;
  for (int row = 0; row < truth.height; ++row)
    for (int col = 0; col < truth.width; ++col) {
      cell_pos c{col, row};
      int i = truth.index(c);
      if (belief.knowledge[i] != cell_knowledge::unknown) continue;
      if (!unlimited && !visible_from(truth, pose, c, radius)) continue;
      belief.knowledge[i] =
          truth.occupancy[i] ? cell_knowledge::known_obstacle : cell_knowledge::known_free;
      belief.labels[i] = truth.labels[i];
      belief.cue_bits[i] = truth.cue_bits[i];
      fresh.push_back(c);
    }
  return fresh;
}

/* ---- map file format ----------------------------------------------------
 *
 *   map <width> <height> sigma=<comma-list> cues=<comma-list> start=<col>,<row>
 *   <height> rows of '.' (free) and '#' (obstacle)
 *   label <col>,<row> <prop>
 *   cue <col>,<row> <cue>
 *   flag blocksPassage <prop>
 *
 * The writer emits label/cue lines sorted by (row, col, name) and flag
 * lines in canonical proposition order, so write(parse(write(m))) is
 * byte-identical.
 */

inline std::string write_map(const grid_map& m) {
  std::ostringstream out;
  auto join = [](const std::vector<std::string>& names) {
    std::string s;
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) s += ",";
      s += names[i];
    }
    return s;
  };
  out << "map " << m.width << ' ' << m.height << " sigma=" << join(m.schema.sigma.names)
      << " cues=" << join(m.schema.cues.names) << " start=" << m.start.col << ',' << m.start.row
      << '\n';
  for (int row = 0; row < m.height; ++row) {
    for (int col = 0; col < m.width; ++col) out << (m.occupancy[m.index({col, row})] ? '#' : '.');
    out << '\n';
  }
  for (int row = 0; row < m.height; ++row)
    for (int col = 0; col < m.width; ++col)
      for (int p = 0; p < m.schema.sigma.size(); ++p)
        if (letter_has(m.labels[m.index({col, row})], p))
          out << "label " << col << ',' << row << ' ' << m.schema.sigma.names[p] << '\n';
  for (int row = 0; row < m.height; ++row)
    for (int col = 0; col < m.width; ++col)
      for (int c = 0; c < m.schema.cues.size(); ++c)
        if (letter_has(m.cue_bits[m.index({col, row})], c))
          out << "cue " << col << ',' << row << ' ' << m.schema.cues.names[c] << '\n';
  for (int p = 0; p < m.schema.sigma.size(); ++p)
    if (letter_has(m.schema.blockers, p))
      out << "flag blocksPassage " << m.schema.sigma.names[p] << '\n';
  return out.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline cell_pos parse_cell(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() != 2) fail(errc::param, "bad cell coordinate: " + s);
  return cell_pos{std::atoi(parts[0].c_str()), std::atoi(parts[1].c_str())};
}

} // namespace detail

inline grid_map parse_map(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("map ", 0) != 0)
    fail(errc::param, "map file must start with a 'map' header");

  grid_map m;
  {
    std::istringstream header(line.substr(4));
    std::string token;
    header >> m.width >> m.height;
    if (m.width <= 0 || m.height <= 0) fail(errc::param, "bad map dimensions");
    std::string sigma_list, cue_list, start_spec;
    while (header >> token) {
      if (token.rfind("sigma=", 0) == 0) sigma_list = token.substr(6);
      else if (token.rfind("cues=", 0) == 0) cue_list = token.substr(5);
      else if (token.rfind("start=", 0) == 0) start_spec = token.substr(6);
      else fail(errc::param, "unknown map header field: " + token);
    }
    if (start_spec.empty()) fail(errc::param, "map header missing start");
    auto names = [&](const std::string& csv) {
      std::vector<std::string> out;
      if (!csv.empty())
        for (auto& n : detail::split(csv, ',')) out.push_back(n);
      return out;
    };
    m.schema.sigma = alphabet::from_names(names(sigma_list));
    m.schema.cues = alphabet::from_names(names(cue_list));
    m.start = detail::parse_cell(start_spec);
  }

  size_t cells = static_cast<size_t>(m.width) * m.height;
  m.occupancy.assign(cells, 0);
  m.labels.assign(cells, 0);
  m.cue_bits.assign(cells, 0);
  for (int row = 0; row < m.height; ++row) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) != m.width)
      fail(errc::param, "map row " + std::to_string(row) + " malformed");
    for (int col = 0; col < m.width; ++col) {
      if (line[col] == '#') m.occupancy[m.index({col, row})] = 1;
      else if (line[col] != '.') fail(errc::param, "bad map glyph");
    }
  }

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string op;
    row >> op;
    if (op == "label" || op == "cue") {
      std::string cell_spec, name;
      row >> cell_spec >> name;
      cell_pos c = detail::parse_cell(cell_spec);
      if (!m.in_bounds(c)) fail(errc::param, "annotation out of bounds: " + line);
      if (m.occupancy[m.index(c)]) fail(errc::param, "annotation on an obstacle: " + line);
      if (op == "label") {
        int p = m.schema.sigma.index_of(name);
        if (p < 0) fail(errc::unknown_proposition, "label not in sigma: " + name);
        m.labels[m.index(c)] |= 1u << p;
      } else {
        int p = m.schema.cues.index_of(name);
        if (p < 0) fail(errc::param, "cue not declared: " + name);
        m.cue_bits[m.index(c)] |= 1u << p;
      }
    } else if (op == "flag") {
      std::string what, name;
      row >> what >> name;
      if (what != "blocksPassage") fail(errc::param, "unknown flag: " + what);
      int p = m.schema.sigma.index_of(name);
      if (p < 0) fail(errc::unknown_proposition, "flag not in sigma: " + name);
      m.schema.blockers |= 1u << p;
    } else {
      fail(errc::param, "unknown map line: " + line);
    }
  }

  if (!m.free_at(m.start)) fail(errc::param, "start cell must be free and in bounds");
  return m;
}

} // namespace potlp
