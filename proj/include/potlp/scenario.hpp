#pragma once

#include <string>
#include <vector>

#include "potlp/errors.hpp"
#include "potlp/grid.hpp"
#include "potlp/rng.hpp"

namespace potlp {

/* ---- firefighting ---------------------------------------------------------
 *
 * Two square rooms joined by parallel hallways. One hallway dead-ends at a
 * wall with the alarm in its deepest cell and green floor tiling along its
 * length; one hallway (possibly the same) holds a two-cell fire segment
 * that blocks passage, announced by smoke on the two cells toward its
 * nearest open mouth. The agent starts in one room; the extinguisher and
 * the exit sit in the other.
 */

struct firefighting_params {
  int room_size = 7;
  int hallway_length = 7;
  int hallway_count = 3;
};

namespace detail {

inline void fill_room(grid_map& m, int col0, int size) {
  for (int r = 0; r < size; ++r)
    for (int c = col0; c < col0 + size; ++c) m.occupancy[m.index({c, r})] = 0;
}

inline std::vector<int> room_cells(const grid_map& m, int col0, int size) {
  std::vector<int> out;
  for (int r = 0; r < size; ++r)
    for (int c = col0; c < col0 + size; ++c)
      if (!m.occupancy[m.index({c, r})]) out.push_back(m.index({c, r}));
  return out;
}

} // namespace detail

/* Deterministic in (seed, params); the draw order below is fixed:
 * dead-end hallway, its open side, fire hallway, fire position, start
 * room, start cell, extinguisher cell, exit cell. */
inline grid_map gen_firefighting(uint64_t seed, firefighting_params p = {}) {
  if (p.hallway_count < 2) fail(errc::param, "need at least two hallways");
  if (p.room_size < 2 * p.hallway_count - 1)
    fail(errc::param, "rooms too small to host the hallway mouths");
  if (p.hallway_length < 6) fail(errc::param, "hallway too short for an announced fire segment");

  grid_map m;
  m.height = p.room_size;
  m.width = 2 * p.room_size + p.hallway_length;
  m.schema.sigma = alphabet::from_names({"alarm", "exit", "extinguisher", "fire"});
  m.schema.cues = alphabet::from_names({"green_floor", "smoke"});
  m.schema.blockers = 1u << m.schema.sigma.index_of("fire");
  m.occupancy.assign(static_cast<size_t>(m.width) * m.height, 1);
  m.labels.assign(m.occupancy.size(), 0);
  m.cue_bits.assign(m.occupancy.size(), 0);

  const int left0 = 0, hall0 = p.room_size, right0 = p.room_size + p.hallway_length;
  detail::fill_room(m, left0, p.room_size);
  detail::fill_room(m, right0, p.room_size);

  const int row_offset = (p.room_size - (2 * p.hallway_count - 1)) / 2;
  std::vector<int> hall_rows;
  for (int i = 0; i < p.hallway_count; ++i) {
    int row = row_offset + 2 * i;
    hall_rows.push_back(row);
    for (int c = hall0; c < right0; ++c) m.occupancy[m.index({c, row})] = 0;
  }

  rng r(seed);
  const int dead = static_cast<int>(r.next_below(p.hallway_count));
  const bool open_left = r.next_below(2) == 0;
  const int fire_hall = static_cast<int>(r.next_below(p.hallway_count));
  const int q = r.next_int(2, p.hallway_length - 4); // fire at hallway offsets q, q+1

  // wall the dead end and put the alarm in the deepest remaining cell
  const int dead_row = hall_rows[dead];
  const int wall_off = open_left ? p.hallway_length - 1 : 0;
  m.occupancy[m.index({hall0 + wall_off, dead_row})] = 1;
  const int alarm_off = open_left ? p.hallway_length - 2 : 1;
  m.labels[m.index({hall0 + alarm_off, dead_row})] |= 1u << m.schema.sigma.index_of("alarm");
  for (int c = hall0; c < right0; ++c)
    if (!m.occupancy[m.index({c, dead_row})])
      m.cue_bits[m.index({c, dead_row})] |= 1u << m.schema.cues.index_of("green_floor");

  // the fire segment blocks its hallway; smoke marks the approach from the
  // nearest open mouth (the only open mouth when it shares the dead end)
  const int fire_row = hall_rows[fire_hall];
  bool smoke_left;
  if (fire_hall == dead) smoke_left = open_left;
  else smoke_left = q <= p.hallway_length - 2 - q;
  for (int off : {q, q + 1})
    m.labels[m.index({hall0 + off, fire_row})] |= 1u << m.schema.sigma.index_of("fire");
  for (int off : {smoke_left ? q - 2 : q + 2, smoke_left ? q - 1 : q + 3})
    m.cue_bits[m.index({hall0 + off, fire_row})] |= 1u << m.schema.cues.index_of("smoke");

  const bool start_left = r.next_below(2) == 0;
  auto start_room = detail::room_cells(m, start_left ? left0 : right0, p.room_size);
  auto goal_room = detail::room_cells(m, start_left ? right0 : left0, p.room_size);
  int start = start_room[r.next_below(start_room.size())];
  m.start = {start % m.width, start / m.width};
  size_t ext_i = r.next_below(goal_room.size());
  size_t exit_i = r.next_below(goal_room.size() - 1);
  if (exit_i >= ext_i) ++exit_i;
  m.labels[goal_room[ext_i]] |= 1u << m.schema.sigma.index_of("extinguisher");
  m.labels[goal_room[exit_i]] |= 1u << m.schema.sigma.index_of("exit");
  return m;
}

/* ---- delivery -------------------------------------------------------------
 *
 * Rooms off a corridor (or a pair of corridors), one door each. Room types
 * cycle through a seeded permutation of office, lab, and classroom, and
 * every floor cell carries the type's wall cue. Exactly one room per type
 * is occupied: lights on (lit_room) and one cell labeled with the matching
 * person (office -> professor, lab -> grad, classroom -> undergrad).
 */

enum class hallway_layout { single, double_sided };

struct delivery_params {
  int room_count = 9;
  hallway_layout layout = hallway_layout::single;
};

inline grid_map gen_delivery(uint64_t seed, delivery_params p = {}) {
  if (p.room_count < 3) fail(errc::param, "need one room per person type");
  const int rw = 5, rh = 4;
  const bool twin = p.layout == hallway_layout::double_sided;

  grid_map m;
  m.width = 1 + p.room_count * (rw + 1);
  m.height = twin ? rh + 4 : rh + 2;
  m.schema.sigma = alphabet::from_names({"grad", "professor", "undergrad"});
  m.schema.cues =
      alphabet::from_names({"classroom_wall", "lab_wall", "lit_room", "office_wall"});
  m.occupancy.assign(static_cast<size_t>(m.width) * m.height, 1);
  m.labels.assign(m.occupancy.size(), 0);
  m.cue_bits.assign(m.occupancy.size(), 0);

  const int top_corridor = 0;
  const int room_row0 = 2;
  const int bottom_corridor = twin ? rh + 3 : -1;
  for (int c = 0; c < m.width; ++c) {
    m.occupancy[m.index({c, top_corridor})] = 0;
    if (twin) m.occupancy[m.index({c, bottom_corridor})] = 0;
  }

  std::vector<std::vector<int>> room_cells(p.room_count);
  for (int i = 0; i < p.room_count; ++i) {
    int col0 = 1 + i * (rw + 1);
    for (int r = room_row0; r < room_row0 + rh; ++r)
      for (int c = col0; c < col0 + rw; ++c) {
        m.occupancy[m.index({c, r})] = 0;
        room_cells[i].push_back(m.index({c, r}));
      }
    int door_col = col0 + rw / 2;
    m.occupancy[m.index({door_col, 1})] = 0; // door to the top corridor
    if (twin) m.occupancy[m.index({door_col, rh + 2})] = 0;
  }

  rng r(seed);
  std::vector<std::string> types = {"classroom", "lab", "office"};
  for (size_t i = types.size(); i > 1; --i) std::swap(types[i - 1], types[r.next_below(i)]);

  std::vector<int> offices, labs, classrooms;
  for (int i = 0; i < p.room_count; ++i) {
    const std::string& t = types[i % 3];
    auto& bucket = t == "office" ? offices : (t == "lab" ? labs : classrooms);
    bucket.push_back(i);
    int cue = m.schema.cues.index_of(t + "_wall");
    for (int cell : room_cells[i]) m.cue_bits[cell] |= 1u << cue;
  }

  auto occupy = [&](std::vector<int>& rooms, const std::string& person) {
    int room = rooms[r.next_below(rooms.size())];
    for (int cell : room_cells[room])
      m.cue_bits[cell] |= 1u << m.schema.cues.index_of("lit_room");
    int cell = room_cells[room][r.next_below(room_cells[room].size())];
    m.labels[cell] |= 1u << m.schema.sigma.index_of(person);
  };
  occupy(offices, "professor");
  occupy(labs, "grad");
  occupy(classrooms, "undergrad");

  std::vector<int> corridor;
  for (int c = 0; c < m.width; ++c) {
    corridor.push_back(m.index({c, top_corridor}));
    if (twin) corridor.push_back(m.index({c, bottom_corridor}));
  }
  int start = corridor[r.next_below(corridor.size())];
  m.start = {start % m.width, start / m.width};
  return m;
}

/* ---- built-in task catalog ------------------------------------------------ */

inline const std::vector<std::string>& firefighting_specs() {
  static const std::vector<std::string> specs = {
      "(!fire U alarm) | ((!fire U extinguisher) & F fire)",
      "!fire U (alarm & F exit)",
      "(!fire U extinguisher) & F (fire & F exit)",
      "!fire U exit",
  };
  return specs;
}

inline const std::vector<std::string>& delivery_specs() {
  static const std::vector<std::string> specs = {
      "F professor & F grad & F undergrad",
  };
  return specs;
}

/* Task text for a scenario's 1-based spec id. */
inline std::string built_in_spec(const std::string& scenario, int id) {
  const std::vector<std::string>* table = nullptr;
  if (scenario == "firefighting") table = &firefighting_specs();
  else if (scenario == "delivery") table = &delivery_specs();
  else fail(errc::param, "unknown scenario: " + scenario);
  if (id < 1 || id > static_cast<int>(table->size()))
    fail(errc::param, "no spec " + std::to_string(id) + " for " + scenario);
  return (*table)[id - 1];
}

} // namespace potlp
