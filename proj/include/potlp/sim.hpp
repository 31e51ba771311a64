#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "potlp/baseline.hpp"
#include "potlp/model.hpp"
#include "potlp/parser.hpp"
#include "potlp/planner.hpp"
#include "potlp/scenario.hpp"

namespace potlp {

enum class trial_outcome { satisfied, violated_impossible, budget_exceeded };

inline const char* to_string(trial_outcome o) {
  switch (o) {
    case trial_outcome::satisfied: return "satisfied";
    case trial_outcome::violated_impossible: return "violatedImpossible";
    default: return "budgetExceeded";
  }
}

enum class planner_kind {
  potlp_oracle,
  potlp_feature,
  potlp_heuristic,
  baseline_nearest,
  known_map,
};

inline const char* planner_id(planner_kind k) {
  switch (k) {
    case planner_kind::potlp_oracle: return "potlp-oracle";
    case planner_kind::potlp_feature: return "potlp-feature";
    case planner_kind::potlp_heuristic: return "potlp-heuristic";
    case planner_kind::baseline_nearest: return "baseline";
    default: return "known-map";
  }
}

inline std::optional<planner_kind> parse_planner_id(const std::string& id) {
  for (planner_kind k : {planner_kind::potlp_oracle, planner_kind::potlp_feature,
                         planner_kind::potlp_heuristic, planner_kind::baseline_nearest,
                         planner_kind::known_map})
    if (id == planner_id(k)) return k;
  return std::nullopt;
}

/* Stable across platforms, unlike std::hash: used to give each planner an
 * independent rng stream within a trial. */
inline uint64_t planner_salt(planner_kind k) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* c = planner_id(k); *c; ++c) h = (h ^ static_cast<uint8_t>(*c)) * 0x100000001b3ULL;
  return h;
}

struct trial_config {
  const grid_map* truth = nullptr;
  const dfa* machine = nullptr;
  planner_kind planner = planner_kind::baseline_nearest;
  int sensor_radius = 6;
  planner_config search;     // seed is the planner's rng stream for this trial
  const feature_model_params* model = nullptr; // required by potlp-feature
  heuristic_config heuristic;
  int step_budget = 0;       // 0: 50 * (width + height)
  std::ostream* trace = nullptr;
  // observation hook, fired at every replan before an action is chosen
  std::function<void(const belief_map&, const std::vector<frontier>&,
                     const std::vector<high_level_action>&)>
      on_replan;
};

struct trial_result {
  int total_cost = 0;
  trial_outcome outcome = trial_outcome::budget_exceeded;
  std::vector<cell_pos> steps_log;
  word word_log;
  int replans = 0;
};

/* Observe, plan, walk one step, repeat. The automaton advances on the
 * label of every cell stepped onto; a replan happens whenever observation
 * revealed new cells or the current plan's path is used up. */
inline trial_result run_trial(const trial_config& cfg) {
  if (!cfg.truth || !cfg.machine) fail(errc::config, "trial needs a map and a compiled task");
  if (cfg.planner == planner_kind::potlp_feature && !cfg.model)
    fail(errc::config, "potlp-feature needs trained model parameters");
  if (cfg.sensor_radius < 0) fail(errc::config, "sensor radius must be non-negative");
  const grid_map& truth = *cfg.truth;
  const dfa& m = *cfg.machine;
  if (!truth.free_at(truth.start)) fail(errc::config, "start cell is not free");

  trial_result out;
  belief_map belief = empty_belief(truth);
  cell_pos pose = truth.start;
  reveal(belief, truth, pose, cfg.sensor_radius);
  letter l0 = static_cast<letter>(truth.labels_at(pose));
  int z = m.step(m.initial, l0);
  out.word_log.push_back(l0);
  if (!m.live(z)) {
    out.outcome = trial_outcome::violated_impossible;
    return out;
  }
  const int budget = cfg.step_budget > 0 ? cfg.step_budget : 50 * (truth.width + truth.height);

  belief_map full;
  if (cfg.planner == planner_kind::known_map) full = full_belief(truth);
  const belief_map& plan_belief = cfg.planner == planner_kind::known_map ? full : belief;

  action_estimator estimator;
  switch (cfg.planner) {
    case planner_kind::potlp_oracle:
      estimator = [&](const high_level_action& a, const std::vector<frontier>& fs) {
        return oracle_estimate(truth, belief, m, a, fs);
      };
      break;
    case planner_kind::potlp_heuristic:
      estimator = [&](const high_level_action& a, const std::vector<frontier>&) {
        return heuristic_estimate(belief, a, cfg.heuristic);
      };
      break;
    case planner_kind::potlp_feature:
      estimator = [&](const high_level_action& a, const std::vector<frontier>& fs) {
        return feature_estimate(*cfg.model, featurize(belief, a, fs));
      };
      break;
    default:
      break;
  }

  std::vector<product_state> path;
  size_t path_at = 1;
  bool need_replan = true;

  while (true) {
    if (m.is_accepting(z)) {
      out.outcome = trial_outcome::satisfied;
      return out;
    }
    if (out.total_cost >= budget) {
      out.outcome = trial_outcome::budget_exceeded;
      return out;
    }

    if (need_replan || path_at >= path.size()) {
      product_state here{pose, z};
      pa_costs costs = pa_dijkstra(plan_belief, m, here);
      std::vector<frontier> frontiers = extract_frontiers(plan_belief);
      std::vector<high_level_action> actions = enumerate_actions(costs, m, frontiers);
      if (cfg.on_replan) cfg.on_replan(plan_belief, frontiers, actions);
      if (actions.empty()) {
        out.outcome = trial_outcome::violated_impossible;
        return out;
      }

      high_level_action chosen;
      switch (cfg.planner) {
        case planner_kind::known_map:
        case planner_kind::baseline_nearest:
          chosen = baseline_select(m, actions);
          break;
        default: {
          built_instance built =
              build_instance(plan_belief, m, here, std::move(frontiers), actions, estimator);
          planner_config search = cfg.search;
          search.seed = mix_seed(cfg.search.seed, static_cast<uint64_t>(out.replans));
          pouct_result r = pouct_search(built.inst, search);
          chosen = action_for(built, r.best);
          frontiers = std::move(built.frontiers);
          break;
        }
      }

      if (cfg.trace)
        *cfg.trace << "replan=" << out.replans << " pose=" << pose.col << ',' << pose.row
                   << " z=" << z << " action=" << format_action(chosen) << '\n';
      ++out.replans;

      if (chosen.is_finish()) {
        auto completion = known_space_completion(costs, m);
        if (!completion) fail(errc::param, "completion chosen without a completion path");
        path = std::move(completion->states);
      } else {
        auto leg = costs.path_to(frontiers[chosen.frontier_id].subgoal, chosen.z_prime);
        if (!leg) fail(errc::param, "chosen action has no known-space path");
        path = std::move(leg->states);
      }
      if (path.size() <= 1) fail(errc::param, "planner produced an empty path");
      path_at = 1;
      need_replan = false;
    }

    const product_state& next = path[path_at];
    if (!plan_belief.known_free(next.pose)) fail(errc::param, "planned step is not known free");
    pose = next.pose;
    letter l = static_cast<letter>(truth.labels_at(pose));
    z = m.step(z, l);
    out.word_log.push_back(l);
    out.steps_log.push_back(pose);
    ++out.total_cost;
    ++path_at;
    if (!reveal(belief, truth, pose, cfg.sensor_radius).empty()) need_replan = true;
  }
}

struct bench_config {
  std::string scenario = "firefighting";
  int spec_id = 1;
  int trials = 100;
  std::vector<planner_kind> planners; // planners[0] is the savings reference
  uint64_t seed = 1;
  int sensor_radius = 6;
  planner_config search;
  const feature_model_params* model = nullptr;
  heuristic_config heuristic;
  int step_budget = 0;
  int jobs = 1;
};

struct trial_row {
  uint64_t trial_seed = 0;
  planner_kind planner = planner_kind::baseline_nearest;
  int cost = 0;
  trial_outcome outcome = trial_outcome::budget_exceeded;
};

struct summary_row {
  planner_kind planner = planner_kind::baseline_nearest;
  int pairs = 0;             // trials where both this planner and the reference satisfied
  double known_map_mean = 0; // full-information optimum over those pairs
  double ref_mean = 0;
  double ours_mean = 0;
  double net_savings_pct = 0;       // 1 - sum(ours)/sum(ref), as percent
  double per_trial_mean_pct = 0;    // mean of per-pair 1 - ours/ref
  double per_trial_se_pct = 0;      // sample standard error of the above
};

struct bench_result {
  std::string spec;
  std::vector<trial_row> rows;        // sorted by (trial seed, planner id)
  std::vector<summary_row> summary;   // in planner order
};

inline grid_map generate_scenario(const std::string& scenario, uint64_t seed) {
  if (scenario == "firefighting") return gen_firefighting(seed);
  if (scenario == "delivery") return gen_delivery(seed);
  fail(errc::config, "unknown scenario: " + scenario);
}

/* Paired benchmark: every planner sees the identical generated world per
 * trial seed, with an independent rng stream per (trial, planner). Savings
 * rows compare each planner to planners[0] over the trials both satisfied. */
inline bench_result run_bench(const bench_config& cfg) {
  if (cfg.trials <= 0) fail(errc::config, "trial count must be positive");
  if (cfg.planners.empty()) fail(errc::config, "no planners given");
  if (cfg.jobs <= 0) fail(errc::config, "jobs must be positive");
  for (planner_kind k : cfg.planners)
    if (k == planner_kind::potlp_feature && !cfg.model)
      fail(errc::config, "potlp-feature needs trained model parameters");

  bench_result out;
  out.spec = built_in_spec(cfg.scenario, cfg.spec_id);
  const alphabet sigma = generate_scenario(cfg.scenario, 1).schema.sigma;
  const dfa m = compile_dfa(parse_spec(out.spec, sigma), sigma);

  struct trial_block {
    uint64_t seed = 0;
    std::optional<int> known_cost;
    std::vector<trial_row> rows; // one per planner, cfg order
  };
  std::vector<trial_block> blocks(cfg.trials);

  auto run_block = [&](int i) {
    trial_block& block = blocks[i];
    block.seed = mix_seed(cfg.seed, static_cast<uint64_t>(i));
    grid_map truth = generate_scenario(cfg.scenario, block.seed);

    belief_map full = full_belief(truth);
    try {
      product_state p0 = initial_product_state(full, m, truth.start);
      if (auto best = known_space_completion(full, m, p0)) block.known_cost = best->total_cost;
    } catch (const error&) {
      // start label alone violates the task: the trial counts as unsatisfiable
    }

    for (planner_kind k : cfg.planners) {
      trial_config tc;
      tc.truth = &truth;
      tc.machine = &m;
      tc.planner = k;
      tc.sensor_radius = cfg.sensor_radius;
      tc.search = cfg.search;
      tc.search.seed = mix_seed(block.seed, planner_salt(k));
      tc.model = cfg.model;
      tc.heuristic = cfg.heuristic;
      tc.step_budget = cfg.step_budget;
      trial_result r = run_trial(tc);
      block.rows.push_back({block.seed, k, r.total_cost, r.outcome});
    }
  };

  if (cfg.jobs == 1) {
    for (int i = 0; i < cfg.trials; ++i) run_block(i);
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < cfg.jobs; ++j)
      pool.emplace_back([&] {
        for (int i = cursor.fetch_add(1); i < cfg.trials; i = cursor.fetch_add(1)) run_block(i);
      });
    for (auto& t : pool) t.join();
  }

  for (const trial_block& block : blocks)
    for (const trial_row& row : block.rows) out.rows.push_back(row);
  std::sort(out.rows.begin(), out.rows.end(), [](const trial_row& a, const trial_row& b) {
    if (a.trial_seed != b.trial_seed) return a.trial_seed < b.trial_seed;
    return std::string(planner_id(a.planner)) < planner_id(b.planner);
  });

  for (size_t p = 0; p < cfg.planners.size(); ++p) {
    summary_row s;
    s.planner = cfg.planners[p];
    double known_sum = 0, ref_sum = 0, ours_sum = 0;
    std::vector<double> savings;
    for (const trial_block& block : blocks) {
      const trial_row& ref = block.rows[0];
      const trial_row& ours = block.rows[p];
      if (ref.outcome != trial_outcome::satisfied || ours.outcome != trial_outcome::satisfied)
        continue;
      if (ref.cost == 0) continue; // degenerate zero-length task, no ratio to take
      ++s.pairs;
      known_sum += block.known_cost.value_or(0);
      ref_sum += ref.cost;
      ours_sum += ours.cost;
      savings.push_back(1.0 - static_cast<double>(ours.cost) / ref.cost);
    }
    if (s.pairs > 0) {
      s.known_map_mean = known_sum / s.pairs;
      s.ref_mean = ref_sum / s.pairs;
      s.ours_mean = ours_sum / s.pairs;
      s.net_savings_pct = 100.0 * (1.0 - ours_sum / ref_sum);
      double mean = 0;
      for (double v : savings) mean += v;
      mean /= savings.size();
      s.per_trial_mean_pct = 100.0 * mean;
      if (savings.size() > 1) {
        double var = 0;
        for (double v : savings) var += (v - mean) * (v - mean);
        var /= static_cast<double>(savings.size() - 1);
        s.per_trial_se_pct = 100.0 * std::sqrt(var / static_cast<double>(savings.size()));
      }
    }
    out.summary.push_back(s);
  }
  return out;
}

namespace detail {

inline std::string format_fixed(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

} // namespace detail

inline void write_results(std::ostream& out, const bench_result& r) {
  out << "results v1\n";
  out << "trialSeed\tplanner\tspec\tcost\toutcome\n";
  for (const trial_row& row : r.rows)
    out << row.trial_seed << '\t' << planner_id(row.planner) << '\t' << r.spec << '\t' << row.cost
        << '\t' << to_string(row.outcome) << '\n';
}

inline void write_summary(std::ostream& out, const bench_result& r) {
  out << "summary v1\n";
  out << "spec\tplanner\tknownMapMean\trefMean\toursMean\tnetSavingsPct\tperTrialMeanPct\t"
         "perTrialSEPct\tpairs\n";
  for (const summary_row& s : r.summary)
    out << r.spec << '\t' << planner_id(s.planner) << '\t' << detail::format_fixed(s.known_map_mean)
        << '\t' << detail::format_fixed(s.ref_mean) << '\t' << detail::format_fixed(s.ours_mean)
        << '\t' << detail::format_fixed(s.net_savings_pct) << '\t'
        << detail::format_fixed(s.per_trial_mean_pct) << '\t'
        << detail::format_fixed(s.per_trial_se_pct) << '\t' << s.pairs << '\n';
}

} // namespace potlp
