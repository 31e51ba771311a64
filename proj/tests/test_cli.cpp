#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "potlp/cli.hpp"

using namespace potlp;
namespace fs = std::filesystem;

namespace {

struct cli_run {
  int code = -1;
  std::string out;
  std::string err;
};

cli_run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corridor_path() { return std::string(POTLP_TEST_DATA) + "/corridor.map"; }

const char* corridor_task = "(!fire U ext) & (F fire)";

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("potlp_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

TEST_CASE("cli: compile reports automaton shape and writes renderings") {
  fs::path dir = fresh_dir("compile");
  cli_run r = invoke({"compile", "--spec", corridor_task, "--sigma", "ext,fire", "--dot",
                      (dir / "m.dot").string(), "--out", (dir / "m.dfa").string()});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("states=4 accepting=[", 0) == 0);
  REQUIRE(slurp(dir / "m.dot").rfind("digraph dfa {", 0) == 0);
  REQUIRE(slurp(dir / "m.dfa").rfind("dfa n=2 states=4", 0) == 0);
}

TEST_CASE("cli: compile handles the trivial task") {
  cli_run r = invoke({"compile", "--spec", "true", "--sigma", "a"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("states=1 ", 0) == 0);
}

TEST_CASE("cli: malformed input exits 2 with a message") {
  cli_run bad_spec = invoke({"compile", "--spec", "F (", "--sigma", "a"});
  REQUIRE(bad_spec.code == 2);
  REQUIRE(!bad_spec.err.empty());

  cli_run bad_flag = invoke({"compile", "--nonsense", "x"});
  REQUIRE(bad_flag.code == 2);

  cli_run no_sub = invoke({});
  REQUIRE(no_sub.code == 2);

  cli_run unknown_planner = invoke({"run", "--map", corridor_path(), "--spec", corridor_task,
                                    "--planner", "sarsa"});
  REQUIRE(unknown_planner.code == 2);
  REQUIRE(unknown_planner.err.find("sarsa") != std::string::npos);

  cli_run missing_map = invoke({"run", "--map", "/nonexistent.map", "--spec", corridor_task,
                                "--planner", "baseline"});
  REQUIRE(missing_map.code == 2);
}

TEST_CASE("cli: help exits 0") {
  cli_run r = invoke({"--help"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("compile") != std::string::npos);
  REQUIRE(r.out.find("bench") != std::string::npos);
}

TEST_CASE("cli: run reports one result line and exit 0 on success") {
  cli_run r = invoke({"run", "--map", corridor_path(), "--spec", corridor_task, "--planner",
                      "potlp-oracle", "--seed", "4"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "cost=3 outcome=satisfied\n");
}

TEST_CASE("cli: full visibility costs the same for every planner") {
  for (const char* planner : {"potlp-oracle", "potlp-heuristic", "baseline", "known-map"}) {
    cli_run r = invoke({"run", "--map", corridor_path(), "--spec", corridor_task, "--planner",
                        planner, "--radius", "9999"});
    INFO(planner);
    REQUIRE(r.code == 0);
    REQUIRE(r.out == "cost=3 outcome=satisfied\n");
  }
}

TEST_CASE("cli: unsatisfied trials exit 3") {
  cli_run r = invoke({"run", "--map", corridor_path(), "--spec", corridor_task, "--planner",
                      "baseline", "--radius", "1", "--budget", "1"});
  REQUIRE(r.code == 3);
  REQUIRE(r.out == "cost=1 outcome=budgetExceeded\n");
}

TEST_CASE("cli: trace goes to the error stream") {
  cli_run r = invoke({"run", "--map", corridor_path(), "--spec", corridor_task, "--planner",
                      "baseline", "--radius", "1", "--trace"});
  REQUIRE(r.code == 0);
  REQUIRE(r.err.find("replan=0 pose=0,0") != std::string::npos);
}

TEST_CASE("cli: bench writes versioned files and prints the summary") {
  fs::path dir = fresh_dir("bench");
  cli_run r = invoke({"bench", "--scenario", "firefighting", "--spec-id", "4", "--trials", "2",
                      "--planners", "baseline,known-map", "--seed", "5", "--out",
                      (dir / "a").string()});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("summary v1\n", 0) == 0);

  std::string results = slurp(dir / "a" / "results.tsv");
  REQUIRE(results.rfind("results v1\n", 0) == 0);
  REQUIRE(std::count(results.begin(), results.end(), '\n') == 2 + 4); // header + 2x2 rows

  std::string summary = slurp(dir / "a" / "summary.tsv");
  REQUIRE(summary == r.out);

  // reruns are byte-identical, including under parallel trial execution
  cli_run again = invoke({"bench", "--scenario", "firefighting", "--spec-id", "4", "--trials",
                          "2", "--planners", "baseline,known-map", "--seed", "5", "--jobs", "2",
                          "--out", (dir / "b").string()});
  REQUIRE(again.code == 0);
  REQUIRE(slurp(dir / "b" / "results.tsv") == results);
  REQUIRE(slurp(dir / "b" / "summary.tsv") == summary);
}

TEST_CASE("cli: a planner benched against itself saves nothing") {
  fs::path dir = fresh_dir("bench_self");
  cli_run r = invoke({"bench", "--scenario", "firefighting", "--spec-id", "4", "--trials", "2",
                      "--planners", "potlp-oracle,potlp-oracle", "--sims", "100", "--seed", "9",
                      "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::istringstream sin(r.out);
  std::string line;
  std::getline(sin, line); // version
  std::getline(sin, line); // header
  while (std::getline(sin, line))
    REQUIRE(line.find("\t0.0000\t0.0000\t0.0000\t") != std::string::npos); // zero savings columns
}

TEST_CASE("cli: data, training, and maps round-trip through files") {
  fs::path dir = fresh_dir("pipeline");

  cli_run empty = invoke({"gen-data", "--scenario", "firefighting", "--trials", "0", "--seed",
                          "3", "--out", (dir / "empty.tsv").string()});
  REQUIRE(empty.code == 0);
  REQUIRE(empty.out == "records=0\n");
  std::string empty_file = slurp(dir / "empty.tsv");
  REQUIRE(empty_file.rfind("trainingdata v1\n", 0) == 0);
  REQUIRE(std::count(empty_file.begin(), empty_file.end(), '\n') == 2); // version + column header

  cli_run data = invoke({"gen-data", "--scenario", "firefighting", "--trials", "2", "--seed", "3",
                         "--out", (dir / "data.tsv").string()});
  REQUIRE(data.code == 0);
  REQUIRE(data.out.rfind("records=", 0) == 0);

  cli_run trained = invoke({"train", "--in", (dir / "data.tsv").string(), "--out",
                            (dir / "model.txt").string(), "--epochs", "300"});
  REQUIRE(trained.code == 0);
  REQUIRE(slurp(dir / "model.txt").rfind("model v1\n", 0) == 0);

  cli_run map_a = invoke({"gen-map", "--scenario", "firefighting", "--seed", "8", "--out",
                          (dir / "a.map").string()});
  cli_run map_b = invoke({"gen-map", "--scenario", "firefighting", "--seed", "8", "--out",
                          (dir / "b.map").string()});
  cli_run map_c = invoke({"gen-map", "--scenario", "firefighting", "--seed", "9", "--out",
                          (dir / "c.map").string()});
  REQUIRE(map_a.code == 0);
  REQUIRE(slurp(dir / "a.map") == slurp(dir / "b.map"));
  REQUIRE(slurp(dir / "a.map") != slurp(dir / "c.map"));

  // the trained model drives the feature planner on a matching-schema map
  cli_run feature = invoke({"run", "--map", (dir / "a.map").string(), "--spec", "!fire U exit",
                            "--planner", "potlp-feature", "--model", (dir / "model.txt").string(),
                            "--seed", "2", "--sims", "200"});
  REQUIRE(feature.code == 0);
  REQUIRE(feature.out.find("outcome=satisfied") != std::string::npos);

  // the feature planner without a model is a configuration error
  cli_run no_model = invoke({"run", "--map", (dir / "a.map").string(), "--spec", "!fire U exit",
                             "--planner", "potlp-feature"});
  REQUIRE(no_model.code == 2);
}
