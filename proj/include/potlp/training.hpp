#pragma once

#include <string>
#include <vector>

#include "potlp/sim.hpp"

namespace potlp {

struct gen_data_config {
  std::string scenario = "firefighting";
  int trials = 20;
  uint64_t seed = 1;
  int sensor_radius = 6;
  // 1-based catalog ids of the tasks trials cycle through; empty = all
  std::vector<int> spec_ids;
};

/* Collect (features, ground-truth estimate) pairs by running baseline
 * trials, cycling through the scenario's task catalog. Every replan labels
 * each available explore action with the full-map oracle, so the data
 * covers beliefs the executor actually visits. */
inline training_data gen_training_data(const gen_data_config& cfg) {
  if (cfg.trials < 0) fail(errc::config, "trial count must be non-negative");

  training_data out;
  const grid_map probe = generate_scenario(cfg.scenario, 1);
  out.names = feature_names(probe.schema);

  const std::vector<std::string>& catalog =
      cfg.scenario == "firefighting" ? firefighting_specs() : delivery_specs();
  std::vector<std::string> specs;
  if (cfg.spec_ids.empty()) {
    specs = catalog;
  } else {
    for (int id : cfg.spec_ids) {
      if (id < 1 || id > static_cast<int>(catalog.size()))
        fail(errc::config, "unknown spec id: " + std::to_string(id));
      specs.push_back(catalog[id - 1]);
    }
  }
  std::vector<dfa> machines;
  for (const std::string& s : specs)
    machines.push_back(compile_dfa(parse_spec(s, probe.schema.sigma), probe.schema.sigma));

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const uint64_t seed_i = mix_seed(cfg.seed, static_cast<uint64_t>(trial));
    const grid_map truth = generate_scenario(cfg.scenario, seed_i);
    const dfa& m = machines[trial % machines.size()];

    trial_config tc;
    tc.truth = &truth;
    tc.machine = &m;
    tc.planner = planner_kind::baseline_nearest;
    tc.sensor_radius = cfg.sensor_radius;
    tc.on_replan = [&](const belief_map& b, const std::vector<frontier>& fs,
                       const std::vector<high_level_action>& as) {
      for (const high_level_action& a : as) {
        if (a.is_finish()) continue;
        training_record rec;
        rec.features = featurize(b, a, fs);
        estimate_triple t = oracle_estimate(truth, b, m, a, fs);
        rec.p = t.p_success;
        rec.cost_success = t.cost_success;
        rec.cost_failure = t.cost_failure;
        out.records.push_back(std::move(rec));
      }
    };
    run_trial(tc);
  }
  return out;
}

} // namespace potlp
