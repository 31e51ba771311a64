#include <catch2/catch_amalgamated.hpp>

#include "potlp/baseline.hpp"
#include "potlp/parser.hpp"

using namespace potlp;

namespace {

struct fixture {
  alphabet sigma = alphabet::from_names({"ext", "fire"});
  dfa m;
  int z0 = -1; // needs ext then fire on consecutive steps: two hops
  int z1 = -1; // needs fire: one hop

  fixture() {
    m = compile_dfa(parse_spec("F (ext & X fire)", sigma), sigma);
    z0 = m.initial;
    z1 = m.step(z0, static_cast<letter>(1u << sigma.index_of("ext")));
    REQUIRE(m.accept_hops[z0] == 2);
    REQUIRE(m.accept_hops[z1] == 1);
  }

  high_level_action explore(int frontier_id, int zp, int zd, int d) const {
    high_level_action a;
    a.k = high_level_action::kind::explore;
    a.frontier_id = frontier_id;
    a.z_prime = zp;
    a.z_dprime = zd;
    a.d = d;
    return a;
  }

  high_level_action finish(int d) const {
    high_level_action a;
    a.k = high_level_action::kind::finish;
    a.d = d;
    return a;
  }
};

} // namespace

TEST_CASE("baseline takes a completion whenever one exists") {
  fixture f;
  std::vector<high_level_action> actions = {f.explore(0, f.z0, f.z1, 2), f.finish(40)};
  high_level_action got = baseline_select(f.m, actions);
  REQUIRE(got.is_finish());
  REQUIRE(got.d == 40);

  // order independent
  std::swap(actions[0], actions[1]);
  REQUIRE(baseline_select(f.m, actions).is_finish());
}

TEST_CASE("baseline goes to the nearest frontier") {
  fixture f;
  std::vector<high_level_action> actions = {f.explore(0, f.z0, f.z1, 7), f.explore(1, f.z0, f.z1, 3)};
  high_level_action got = baseline_select(f.m, actions);
  REQUIRE(got.frontier_id == 1);
  REQUIRE(got.d == 3);
}

TEST_CASE("equal travel prefers the landing state nearer acceptance") {
  fixture f;
  // landing states two hops vs one hop from acceptance
  std::vector<high_level_action> actions = {f.explore(0, f.z0, f.z0, 4), f.explore(1, f.z1, f.z1, 4)};
  high_level_action got = baseline_select(f.m, actions);
  REQUIRE(got.frontier_id == 1);
}

TEST_CASE("remaining ties fall to frontier id, then automaton indices") {
  fixture f;
  std::vector<high_level_action> a_by_frontier = {f.explore(2, f.z0, f.z1, 5),
                                                  f.explore(1, f.z0, f.z1, 5)};
  REQUIRE(baseline_select(f.m, a_by_frontier).frontier_id == 1);

  std::vector<high_level_action> a_by_zp = {f.explore(0, f.z1, f.z1, 5), f.explore(0, f.z0, f.z1, 5)};
  REQUIRE(baseline_select(f.m, a_by_zp).z_prime == f.z0);
}

TEST_CASE("baseline ignores estimates entirely") {
  // structural guarantee: selection reads only travel cost, automaton
  // distance, and identity fields, so no estimator is even passed in
  fixture f;
  std::vector<high_level_action> actions = {f.explore(0, f.z0, f.z1, 3)};
  REQUIRE(baseline_select(f.m, actions).frontier_id == 0);
}

TEST_CASE("empty action set is an error") {
  fixture f;
  try {
    baseline_select(f.m, {});
    FAIL("expected an error");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::no_action);
  }
}
