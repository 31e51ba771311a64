#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "potlp/log.hpp"
#include "potlp/parser.hpp"
#include "potlp/sim.hpp"
#include "potlp/training.hpp"

namespace potlp {
namespace detail {

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (const std::string& item : out)
    if (item.empty()) fail(errc::config, "empty entry in list: " + s);
  return out;
}

inline grid_map load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) fail(errc::config, "cannot read map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

inline feature_model_params load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) fail(errc::config, "cannot read model file: " + path);
  return parse_feature_model(in);
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out.good()) fail(errc::config, "cannot write file: " + path);
  return out;
}

inline std::vector<planner_kind> parse_planner_list(const std::string& csv) {
  std::vector<planner_kind> out;
  for (const std::string& name : split_csv(csv)) {
    auto kind = parse_planner_id(name);
    if (!kind) fail(errc::config, "unknown planner: " + name);
    out.push_back(*kind);
  }
  return out;
}

} // namespace detail

/* Exit codes: 0 success, 2 configuration or input error, 3 the trial ran
 * but the task was not satisfied. */
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"temporal-task planning and benchmarking in partially known grid worlds"};
  app.require_subcommand(1);

  std::string spec_text, sigma_csv, dot_path, dfa_out_path;
  CLI::App* compile = app.add_subcommand("compile", "compile a task expression into an automaton");
  compile->add_option("--spec", spec_text, "task expression")->required();
  compile->add_option("--sigma", sigma_csv, "comma-separated proposition names")->required();
  compile->add_option("--dot", dot_path, "write a graphviz rendering to this path");
  compile->add_option("--out", dfa_out_path, "write the serialized automaton to this path");

  std::string map_path, run_spec_text, planner_name, model_path;
  uint64_t run_seed = 1;
  int radius = 6, sims = 2000, budget = 0;
  bool trace = false;
  CLI::App* run = app.add_subcommand("run", "run one trial on a map file");
  run->add_option("--map", map_path, "map file")->required();
  run->add_option("--spec", run_spec_text, "task expression over the map's propositions")
      ->required();
  run->add_option("--planner", planner_name, "planner id")->required();
  run->add_option("--seed", run_seed, "search rng seed");
  run->add_option("--radius", radius, "sensor radius in cells");
  run->add_option("--sims", sims, "tree-search simulations per replan");
  run->add_option("--model", model_path, "trained model file (potlp-feature)");
  run->add_option("--budget", budget, "step budget override");
  run->add_flag("--trace", trace, "log each replan to the error stream");

  std::string scenario = "firefighting", planners_csv, out_dir;
  int spec_id = 1, trials = 100, jobs = 1;
  uint64_t bench_seed = 1;
  int bench_radius = 6, bench_sims = 2000, bench_budget = 0;
  std::string bench_model_path;
  CLI::App* bench = app.add_subcommand("bench", "paired benchmark over generated worlds");
  bench->add_option("--scenario", scenario, "firefighting or delivery");
  bench->add_option("--spec-id", spec_id, "built-in task id (1-based)");
  bench->add_option("--trials", trials, "generated worlds per planner");
  bench->add_option("--planners", planners_csv, "comma-separated planner ids, first is reference")
      ->required();
  bench->add_option("--seed", bench_seed, "benchmark seed");
  bench->add_option("--out", out_dir, "directory for results.tsv and summary.tsv")->required();
  bench->add_option("--jobs", jobs, "worker threads for trials");
  bench->add_option("--radius", bench_radius, "sensor radius in cells");
  bench->add_option("--sims", bench_sims, "tree-search simulations per replan");
  bench->add_option("--model", bench_model_path, "trained model file (potlp-feature)");
  bench->add_option("--budget", bench_budget, "step budget override");

  std::string data_scenario = "firefighting", data_out;
  int data_trials = 20, data_radius = 6;
  uint64_t data_seed = 1;
  std::vector<int> data_spec_ids;
  CLI::App* gen_data = app.add_subcommand("gen-data", "collect labeled training records");
  gen_data->add_option("--scenario", data_scenario, "firefighting or delivery");
  gen_data->add_option("--trials", data_trials, "baseline trials to harvest");
  gen_data->add_option("--seed", data_seed, "generation seed");
  gen_data->add_option("--out", data_out, "training data file")->required();
  gen_data->add_option("--radius", data_radius, "sensor radius in cells");
  gen_data->add_option("--spec-ids", data_spec_ids, "task catalog ids to cycle (default all)")
      ->delimiter(',');

  std::string train_in, train_out;
  train_config tr;
  CLI::App* train = app.add_subcommand("train", "fit the feature model to a training data file");
  train->add_option("--in", train_in, "training data file")->required();
  train->add_option("--out", train_out, "model file")->required();
  train->add_option("--l2", tr.l2, "ridge strength");
  train->add_option("--epochs", tr.epochs, "gradient descent epochs");
  train->add_option("--lr", tr.lr, "gradient descent step size");

  std::string map_scenario = "firefighting", map_out;
  uint64_t map_seed = 1;
  CLI::App* gen_map = app.add_subcommand("gen-map", "write one generated world to a map file");
  gen_map->add_option("--scenario", map_scenario, "firefighting or delivery");
  gen_map->add_option("--seed", map_seed, "generation seed");
  gen_map->add_option("--out", map_out, "map file")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand(compile)) {
      alphabet sigma = alphabet::from_names(detail::split_csv(sigma_csv));
      dfa m = compile_dfa(parse_spec(spec_text, sigma), sigma);
      out << "states=" << m.state_count() << " accepting=[";
      for (size_t i = 0; i < m.accepting.size(); ++i) out << (i ? "," : "") << m.accepting[i];
      out << "]\n";
      if (!dot_path.empty()) detail::open_output(dot_path) << dfa_to_dot(m);
      if (!dfa_out_path.empty()) detail::open_output(dfa_out_path) << serialize_dfa(m);
      return 0;
    }

    if (app.got_subcommand(run)) {
      grid_map truth = detail::load_map_file(map_path);
      dfa m = compile_dfa(parse_spec(run_spec_text, truth.schema.sigma), truth.schema.sigma);
      auto kind = parse_planner_id(planner_name);
      if (!kind) fail(errc::config, "unknown planner: " + planner_name);
      std::optional<feature_model_params> model;
      if (!model_path.empty()) model = detail::load_model_file(model_path);
      trial_config tc;
      tc.truth = &truth;
      tc.machine = &m;
      tc.planner = *kind;
      tc.sensor_radius = radius;
      tc.search.seed = run_seed;
      tc.search.n_sims = sims;
      tc.step_budget = budget;
      if (model) tc.model = &*model;
      if (trace) tc.trace = &err;
      trial_result r = run_trial(tc);
      out << "cost=" << r.total_cost << " outcome=" << to_string(r.outcome) << '\n';
      return r.outcome == trial_outcome::satisfied ? 0 : 3;
    }

    if (app.got_subcommand(bench)) {
      bench_config bc;
      bc.scenario = scenario;
      bc.spec_id = spec_id;
      bc.trials = trials;
      bc.planners = detail::parse_planner_list(planners_csv);
      bc.seed = bench_seed;
      bc.sensor_radius = bench_radius;
      bc.search.n_sims = bench_sims;
      bc.step_budget = bench_budget;
      bc.jobs = jobs;
      std::optional<feature_model_params> model;
      if (!bench_model_path.empty()) {
        model = detail::load_model_file(bench_model_path);
        bc.model = &*model;
      }
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) fail(errc::config, "cannot create output directory: " + out_dir);
      std::ofstream results_file = detail::open_output(out_dir + "/results.tsv");
      std::ofstream summary_file = detail::open_output(out_dir + "/summary.tsv");
      log_line(log_level::info, "bench: " + std::to_string(bc.trials) + " trials x " +
                                    std::to_string(bc.planners.size()) + " planners");
      bench_result r = run_bench(bc);
      write_results(results_file, r);
      write_summary(summary_file, r);
      write_summary(out, r);
      return 0;
    }

    if (app.got_subcommand(gen_data)) {
      gen_data_config gc;
      gc.scenario = data_scenario;
      gc.trials = data_trials;
      gc.seed = data_seed;
      gc.sensor_radius = data_radius;
      gc.spec_ids = data_spec_ids;
      std::ofstream file = detail::open_output(data_out);
      training_data data = gen_training_data(gc);
      write_training_records(file, data.records, data.names);
      out << "records=" << data.records.size() << '\n';
      return 0;
    }

    if (app.got_subcommand(train)) {
      std::ifstream in(train_in);
      if (!in.good()) fail(errc::config, "cannot read training data file: " + train_in);
      training_data data = parse_training_records(in);
      std::ofstream file = detail::open_output(train_out);
      feature_model_params params = train_feature_model(data.records, data.names, tr);
      write_feature_model(file, params);
      out << "trained records=" << data.records.size() << " features=" << data.names.size()
          << '\n';
      return 0;
    }

    if (app.got_subcommand(gen_map)) {
      std::ofstream file = detail::open_output(map_out);
      file << write_map(generate_scenario(map_scenario, map_seed));
      out << "map written to " << map_out << '\n';
      return 0;
    }
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

} // namespace potlp
