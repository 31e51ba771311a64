#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "potlp/actions.hpp"
#include "potlp/parser.hpp"

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

dfa firefighting_dfa(const alphabet& sigma) {
  return compile_dfa(parse_spec("(!fire U ext) & (F fire)", sigma), sigma);
}

} // namespace

TEST_CASE("z_next: firefighting ladder") {
  grid_map m = load_corridor();
  dfa d = firefighting_dfa(m.schema.sigma);
  letter e = 1u << m.schema.sigma.index_of("ext");
  letter f = 1u << m.schema.sigma.index_of("fire");
  int z0 = d.initial;
  int z1 = d.step(z0, e);
  int top = d.step(z1, f);
  REQUIRE(d.accept_hops[top] == 0);

  REQUIRE(z_next(d, z0) == std::vector<int>{z1, top});
  REQUIRE(z_next(d, z1) == std::vector<int>{top});
  REQUIRE(z_next(d, top).empty());
}

TEST_CASE("z_next: dead successors are excluded") {
  alphabet sigma = alphabet::from_names({"a", "b"});
  dfa d = compile_dfa(parse_spec("!b U a", sigma), sigma);
  // the sink is reachable from the initial state but never listed
  for (int z2 : z_next(d, d.initial)) REQUIRE(d.live(z2));
}

TEST_CASE("enumerate: corridor before and after the fire is revealed") {
  grid_map m = load_corridor();
  dfa d = firefighting_dfa(m.schema.sigma);
  letter e = 1u << m.schema.sigma.index_of("ext");
  int z1 = d.step(d.initial, e);
  int top = d.step(z1, 1u << m.schema.sigma.index_of("fire"));

  belief_map b = empty_belief(m);
  reveal(b, m, {0, 0}, 2); // x3 still unknown
  product_state p0 = initial_product_state(b, d, {0, 0});
  auto frontiers = extract_frontiers(b);
  auto acts = enumerate_actions(b, d, p0, frontiers);

  REQUIRE(acts.size() == 1);
  REQUIRE(acts[0].k == high_level_action::kind::explore);
  REQUIRE(acts[0].frontier_id == 0);
  REQUIRE(acts[0].z_prime == z1);
  REQUIRE(acts[0].z_dprime == top);
  REQUIRE(acts[0].d == 2);
  REQUIRE(format_action(acts[0]) ==
          "s0:z'" + std::to_string(z1) + "->z''" + std::to_string(top) + " D=2");

  reveal(b, m, {2, 0}, 2); // fire cell becomes known
  auto after = enumerate_actions(b, d, p0, extract_frontiers(b));
  REQUIRE(after.size() == 1);
  REQUIRE(after[0].is_finish());
  REQUIRE(after[0].d == 3);
  REQUIRE(format_action(after[0]) == "finish D=3");
}

TEST_CASE("enumerate: cartesian growth over frontiers and transitions") {
  // cross-shaped known region with two frontier arms; the task's first
  // state has two live outgoing transitions
  alphabet sigma = alphabet::from_names({"a", "b"});
  dfa d = compile_dfa(parse_spec("F a | F b", sigma), sigma);

  grid_map m;
  m.width = 5;
  m.height = 3;
  m.schema.sigma = sigma;
  m.occupancy.assign(15, 0);
  m.labels.assign(15, 0);
  m.cue_bits.assign(15, 0);
  m.start = {2, 1};

  belief_map b = empty_belief(m);
  for (int c = 1; c <= 3; ++c) b.knowledge[b.index({c, 1})] = cell_knowledge::known_free;

  product_state p0 = initial_product_state(b, d, m.start);
  auto frontiers = extract_frontiers(b);
  REQUIRE(frontiers.size() == 1); // one 8-connected boundary strip
  auto acts = enumerate_actions(b, d, p0, frontiers);

  // |z_next(z0)| successors x 1 frontier, no finish (nothing accepting known)
  REQUIRE(acts.size() == z_next(d, p0.z).size());
  for (const auto& a : acts) {
    REQUIRE(a.k == high_level_action::kind::explore);
    REQUIRE(a.z_prime == p0.z);
  }
}

TEST_CASE("enumerate: fully revealed map yields finish only") {
  grid_map m = load_corridor();
  dfa d = firefighting_dfa(m.schema.sigma);
  belief_map b = full_belief(m);
  product_state p0 = initial_product_state(b, d, {0, 0});
  auto acts = enumerate_actions(b, d, p0, extract_frontiers(b));
  REQUIRE(acts.size() == 1);
  REQUIRE(acts[0].is_finish());
  REQUIRE(acts[0].d == 3);
}

TEST_CASE("enumerate: encodings round-trip and order is deterministic") {
  grid_map m = load_corridor();
  dfa d = firefighting_dfa(m.schema.sigma);
  belief_map b = empty_belief(m);
  reveal(b, m, {0, 0}, 2);
  product_state p0 = initial_product_state(b, d, {0, 0});
  auto frontiers = extract_frontiers(b);

  auto first = enumerate_actions(b, d, p0, frontiers);
  auto second = enumerate_actions(b, d, p0, frontiers);
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i) {
    REQUIRE(first[i].same_move(second[i]));
    REQUIRE(first[i].d == second[i].d);
    if (first[i].k == high_level_action::kind::explore) {
      transition_profile expected = transition_encoding(d, first[i].z_prime, first[i].z_dprime);
      REQUIRE(first[i].encoding.stay == expected.stay);
      REQUIRE(first[i].encoding.go == expected.go);
    }
  }
}

TEST_CASE("enumerate: ordering follows frontier then automaton states") {
  // two separated frontier arms around a corridor junction
  alphabet sigma = alphabet::from_names({"a", "b"});
  dfa d = compile_dfa(parse_spec("F a | F b", sigma), sigma);

  grid_map m;
  m.width = 3;
  m.height = 5;
  m.schema.sigma = sigma;
  m.occupancy.assign(15, 0);
  m.labels.assign(15, 0);
  m.cue_bits.assign(15, 0);
  m.start = {1, 2};

  belief_map b = empty_belief(m);
  for (int r = 1; r <= 3; ++r) b.knowledge[b.index({1, r})] = cell_knowledge::known_free;
  // obstacles left and right so the column is the whole known world
  for (int r = 1; r <= 3; ++r) {
    b.knowledge[b.index({0, r})] = cell_knowledge::known_obstacle;
    b.knowledge[b.index({2, r})] = cell_knowledge::known_obstacle;
  }

  product_state p0 = initial_product_state(b, d, m.start);
  auto frontiers = extract_frontiers(b);
  REQUIRE(frontiers.size() == 2);
  auto acts = enumerate_actions(b, d, p0, frontiers);
  REQUIRE(acts.size() == 2 * z_next(d, p0.z).size());
  for (size_t i = 1; i < acts.size(); ++i) {
    auto key = [](const high_level_action& a) {
      return std::tuple<int, int, int>(a.frontier_id, a.z_prime, a.z_dprime);
    };
    REQUIRE(key(acts[i - 1]) < key(acts[i]));
  }
}
