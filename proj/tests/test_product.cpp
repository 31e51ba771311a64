#include <catch2/catch_amalgamated.hpp>

#include <deque>
#include <fstream>
#include <sstream>

#include "potlp/parser.hpp"
#include "potlp/product.hpp"
#include "potlp/rng.hpp"

using namespace potlp;

namespace {

std::string fixture(const std::string& name) { return std::string(POTLP_TEST_DATA) + "/" + name; }

grid_map load_corridor() {
  std::ifstream in(fixture("corridor.map"));
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

/* Materialized-product reference: builds every (cell, z) node explicitly
 * and runs plain breadth-first search. Slow but obviously correct. */
std::vector<int> brute_force_costs(const belief_map& b, const dfa& m, product_state from) {
  const int nz = m.state_count();
  auto pack = [&](cell_pos c, int z) { return (c.row * b.width + c.col) * nz + z; };
  std::vector<int> dist(static_cast<size_t>(b.width) * b.height * nz, pa_costs::unreachable);
  std::deque<int> queue;
  dist[pack(from.pose, from.z)] = 0;
  queue.push_back(pack(from.pose, from.z));
  while (!queue.empty()) {
    int at = queue.front();
    queue.pop_front();
    cell_pos here{at / nz % b.width, at / nz / b.width};
    int z = at % nz;
    for (auto& d : detail::step4) {
      cell_pos next{here.col + d[0], here.row + d[1]};
      if (!b.known_free(next)) continue;
      if (!edge_passable(b.schema, b.labels_at(here), b.labels_at(next))) continue;
      int z2 = m.step(z, static_cast<letter>(b.labels_at(next)));
      if (!m.live(z2)) continue;
      int to = pack(next, z2);
      if (dist[to] != pa_costs::unreachable) continue;
      dist[to] = dist[at] + 1;
      queue.push_back(to);
    }
  }
  return dist;
}

grid_map random_map(rng& r, int width, int height, const std::vector<std::string>& sigma) {
  grid_map m;
  m.width = width;
  m.height = height;
  m.schema.sigma = alphabet::from_names(sigma);
  m.occupancy.assign(static_cast<size_t>(width) * height, 0);
  m.labels.assign(m.occupancy.size(), 0);
  m.cue_bits.assign(m.occupancy.size(), 0);
  for (auto& cell : m.occupancy) cell = r.bernoulli(0.25) ? 1 : 0;
  std::vector<int> free_cells;
  for (int i = 0; i < width * height; ++i)
    if (!m.occupancy[i]) free_cells.push_back(i);
  if (free_cells.empty()) {
    m.occupancy[0] = 0;
    free_cells.push_back(0);
  }
  for (int i : free_cells)
    for (int p = 0; p < m.schema.sigma.size(); ++p)
      if (r.bernoulli(0.12)) m.labels[i] |= 1u << p;
  int s = free_cells[r.next_below(free_cells.size())];
  m.start = {s % width, s / width};
  return m;
}

} // namespace

TEST_CASE("initial state: start label is consumed once") {
  grid_map m = load_corridor();
  dfa d = compile_dfa(parse_spec("(!fire U ext) & (F fire)", m.schema.sigma), m.schema.sigma);
  belief_map b = full_belief(m);

  product_state p0 = initial_product_state(b, d, {0, 0});
  REQUIRE(p0.z == d.initial);

  // starting on the extinguisher moves the automaton forward immediately
  product_state p2 = initial_product_state(b, d, {2, 0});
  REQUIRE(p2.z == d.step(d.initial, static_cast<letter>(b.labels_at({2, 0}))));
  REQUIRE(p2.z != d.initial);

  // starting on fire violates the safety part outright
  REQUIRE_THROWS_MATCHES(initial_product_state(b, d, {3, 0}), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                           return e.code() == errc::immediate_violation;
                         }));
}

TEST_CASE("pa_dijkstra: corridor reaches acceptance in three moves") {
  grid_map m = load_corridor();
  dfa d = compile_dfa(parse_spec("(!fire U ext) & (F fire)", m.schema.sigma), m.schema.sigma);
  belief_map b = full_belief(m);
  product_state p0 = initial_product_state(b, d, {0, 0});

  pa_costs costs = pa_dijkstra(b, d, p0);
  REQUIRE(d.accepting.size() == 1);
  int top = d.accepting[0];
  REQUIRE(costs.cost({3, 0}, top) == 3);

  auto path = costs.path_to({3, 0}, top);
  REQUIRE(path.has_value());
  REQUIRE(path->total_cost == 3);
  REQUIRE(path->states.front() == p0);
  REQUIRE(path->states.back() == product_state{{3, 0}, top});
}

TEST_CASE("pa_dijkstra: accepting source costs zero to itself") {
  grid_map m = load_corridor();
  alphabet sigma = m.schema.sigma;
  dfa d = compile_dfa(parse_spec("F ext", sigma), sigma);
  belief_map b = full_belief(m);
  product_state at_goal = initial_product_state(b, d, {2, 0});
  REQUIRE(d.accept_hops[at_goal.z] == 0);
  pa_costs costs = pa_dijkstra(b, d, at_goal);
  REQUIRE(costs.cost({2, 0}, at_goal.z) == 0);
  auto path = costs.path_to({2, 0}, at_goal.z);
  REQUIRE(path->total_cost == 0);
  REQUIRE(path->states.size() == 1);
}

TEST_CASE("pa_dijkstra: goal behind a forbidden cell is unreachable") {
  // exit sits past the fire cell; safety forbids ever entering fire
  grid_map m;
  m.width = 4;
  m.height = 1;
  m.schema.sigma = alphabet::from_names({"exit", "fire"});
  m.occupancy.assign(4, 0);
  m.labels.assign(4, 0);
  m.cue_bits.assign(4, 0);
  m.labels[2] |= 1u << m.schema.sigma.index_of("fire");
  m.labels[3] |= 1u << m.schema.sigma.index_of("exit");
  m.start = {0, 0};

  dfa d = compile_dfa(parse_spec("!fire U exit", m.schema.sigma), m.schema.sigma);
  belief_map b = full_belief(m);
  product_state p0 = initial_product_state(b, d, {0, 0});
  pa_costs costs = pa_dijkstra(b, d, p0);
  for (int z = 0; z < d.state_count(); ++z) REQUIRE_FALSE(costs.reached({3, 0}, z));
  REQUIRE_FALSE(known_space_completion(costs, d).has_value());
}

TEST_CASE("pa_dijkstra: unknown cells are not traversable") {
  grid_map m = load_corridor();
  dfa d = compile_dfa(parse_spec("F fire", m.schema.sigma), m.schema.sigma);
  belief_map b = empty_belief(m);
  reveal(b, m, {0, 0}, 1); // only x0, x1 known
  product_state p0 = initial_product_state(b, d, {0, 0});
  pa_costs costs = pa_dijkstra(b, d, p0);
  REQUIRE(costs.cost({1, 0}, d.initial) == 1);
  for (int z = 0; z < d.state_count(); ++z) {
    REQUIRE_FALSE(costs.reached({2, 0}, z));
    REQUIRE_FALSE(costs.reached({3, 0}, z));
  }
}

TEST_CASE("z_reach: corridor frontier is reached with the extinguisher consumed") {
  grid_map m = load_corridor();
  dfa d = compile_dfa(parse_spec("(!fire U ext) & (F fire)", m.schema.sigma), m.schema.sigma);
  belief_map b = empty_belief(m);
  reveal(b, m, {0, 0}, 2); // x0..x2 known, x3 unknown
  REQUIRE(b.is_unknown({3, 0}));

  auto frontiers = extract_frontiers(b);
  REQUIRE(frontiers.size() == 1);
  REQUIRE(frontiers[0].subgoal == cell_pos{2, 0});

  product_state p0 = initial_product_state(b, d, {0, 0});
  pa_costs costs = pa_dijkstra(b, d, p0);
  auto zr = z_reach(costs, d, frontiers[0]);
  int z1 = d.step(d.initial, static_cast<letter>(1u << m.schema.sigma.index_of("ext")));
  REQUIRE(zr == std::vector<std::pair<int, int>>{{z1, 2}});
}

TEST_CASE("z_reach: adjacent frontier with no labels keeps the start state") {
  grid_map m;
  m.width = 3;
  m.height = 1;
  m.schema.sigma = alphabet::from_names({"a"});
  m.occupancy.assign(3, 0);
  m.labels.assign(3, 0);
  m.cue_bits.assign(3, 0);
  m.start = {0, 0};
  dfa d = compile_dfa(parse_spec("F a", m.schema.sigma), m.schema.sigma);
  belief_map b = empty_belief(m);
  reveal(b, m, {0, 0}, 1);
  auto frontiers = extract_frontiers(b);
  REQUIRE(frontiers.size() == 1);
  product_state p0 = initial_product_state(b, d, {0, 0});
  auto zr = z_reach(b, d, p0, frontiers[0]);
  REQUIRE(zr == std::vector<std::pair<int, int>>{{p0.z, 1}});
}

TEST_CASE("z_reach: walled-off frontier is empty") {
  grid_map m;
  m.width = 3;
  m.height = 3;
  m.schema.sigma = alphabet::from_names({"a"});
  m.occupancy.assign(9, 0);
  m.labels.assign(9, 0);
  m.cue_bits.assign(9, 0);
  m.start = {0, 0};
  dfa d = compile_dfa(parse_spec("F a", m.schema.sigma), m.schema.sigma);
  belief_map b = empty_belief(m);
  // row 0 known free, row 1 known obstacles, (0,2) known free next to
  // unknown space but unreachable from the top row
  for (int c = 0; c < 3; ++c) {
    b.knowledge[b.index({c, 0})] = cell_knowledge::known_free;
    b.knowledge[b.index({c, 1})] = cell_knowledge::known_obstacle;
  }
  b.knowledge[b.index({0, 2})] = cell_knowledge::known_free;
  auto frontiers = extract_frontiers(b);
  REQUIRE(frontiers.size() == 1);
  REQUIRE(frontiers[0].cells == std::vector<cell_pos>{{0, 2}});
  product_state p0 = initial_product_state(b, d, {0, 0});
  REQUIRE(z_reach(b, d, p0, frontiers[0]).empty());
}

TEST_CASE("known_space_completion: corridor completes at cost three") {
  grid_map m = load_corridor();
  dfa d = compile_dfa(parse_spec("(!fire U ext) & (F fire)", m.schema.sigma), m.schema.sigma);
  belief_map b = full_belief(m);
  product_state p0 = initial_product_state(b, d, {0, 0});
  auto done = known_space_completion(pa_dijkstra(b, d, p0), d);
  REQUIRE(done.has_value());
  REQUIRE(done->total_cost == 3);
  REQUIRE(done->states.back().pose == cell_pos{3, 0});

  // replaying the path's labels through the automaton ends accepting and
  // never touches a dead state
  word w;
  for (const auto& st : done->states) w.push_back(static_cast<letter>(b.labels_at(st.pose)));
  int z = d.initial;
  for (letter l : w) {
    z = d.step(z, l);
    REQUIRE(d.live(z));
  }
  REQUIRE(d.accept_hops[z] == 0);
}

TEST_CASE("known_space_completion: absent until the goal is revealed") {
  grid_map m = load_corridor();
  dfa d = compile_dfa(parse_spec("(!fire U ext) & (F fire)", m.schema.sigma), m.schema.sigma);
  belief_map b = empty_belief(m);
  reveal(b, m, {0, 0}, 2);
  product_state p0 = initial_product_state(b, d, {0, 0});
  REQUIRE_FALSE(known_space_completion(pa_dijkstra(b, d, p0), d).has_value());
  reveal(b, m, {2, 0}, 2);
  auto done = known_space_completion(pa_dijkstra(b, d, p0), d);
  REQUIRE(done.has_value());
  REQUIRE(done->total_cost == 3);
}

TEST_CASE("oracle agreement: lazy search equals brute force on random maps") {
  rng r(4242);
  std::vector<std::string> specs = {"F a",       "!b U a",       "(!b U a) & (F b)",
                                    "F (a & F b)", "a U (b U c)"};
  alphabet sigma = alphabet::from_names({"a", "b", "c"});
  std::vector<dfa> dfas;
  for (const auto& s : specs) dfas.push_back(compile_dfa(parse_spec(s, sigma), sigma));

  for (int trial = 0; trial < 40; ++trial) {
    grid_map m = random_map(r, r.next_int(2, 8), r.next_int(2, 8), {"a", "b", "c"});
    if (r.bernoulli(0.3)) m.schema.blockers = 1u << r.next_int(0, 2);
    belief_map b = full_belief(m);
    for (const auto& d : dfas) {
      int z0 = d.step(d.initial, static_cast<letter>(b.labels_at(m.start)));
      if (!d.live(z0)) continue;
      product_state from{m.start, z0};
      pa_costs lazy = pa_dijkstra(b, d, from);
      std::vector<int> reference = brute_force_costs(b, d, from);
      REQUIRE(lazy.dist == reference);
    }
  }
}

TEST_CASE("monotonicity: revealing more never raises a finite cost") {
  rng r(99);
  alphabet sigma = alphabet::from_names({"a", "b"});
  dfa d = compile_dfa(parse_spec("F (a & F b)", sigma), sigma);
  for (int trial = 0; trial < 20; ++trial) {
    grid_map m = random_map(r, 6, 6, {"a", "b"});
    belief_map partial = empty_belief(m);
    reveal(partial, m, m.start, 2);
    belief_map fuller = partial;
    reveal(fuller, m, m.start, 4);
    int z0 = d.step(d.initial, static_cast<letter>(m.labels_at(m.start)));
    if (!d.live(z0)) continue;
    product_state from{m.start, z0};
    pa_costs before = pa_dijkstra(partial, d, from);
    pa_costs after = pa_dijkstra(fuller, d, from);
    for (size_t i = 0; i < before.dist.size(); ++i)
      if (before.dist[i] != pa_costs::unreachable) REQUIRE(after.dist[i] <= before.dist[i]);
  }
}
