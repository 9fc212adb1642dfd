// Copyright 2026 The shaped-ucbvi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "sucbvi/environments.hpp"
#include "sucbvi/harness.hpp"
#include "sucbvi/learner.hpp"
#include "sucbvi/pruning.hpp"
#include "sucbvi/shaping.hpp"

using namespace sucbvi;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const fs::path kRoot = fs::temp_directory_path() / "sucbvi-acceptance";

// Runs a harness command into kRoot/<dir> and returns the parsed summary.
json job(const std::string& command, const std::string& dir, json config) {
  const fs::path out = kRoot / dir;
  fs::remove_all(out);
  config["output_dir"] = out.string();
  ExperimentConfig c = ExperimentConfig::from_json(config.dump());
  return json::parse(run_command(command, c).summary_json);
}

// Jobs reused by the determinism check.
const json kCorridorRun = {{"env", "dcorridor10x20"}, {"variants", {"UCBVI", "Shaped-P", "Shaped"}},
                    {"beta", 1.5},           {"episodes", 5000},
                    {"seeds", {1, 2, 3}}};
const json kDecayJob = {{"env", "corridor10"}, {"beta", 1.5}, {"corrupt_sigma", 1.0},
                     {"seeds", {1, 2, 3}}};
const json kModelselJob = {{"env", "corridor10"}, {"beta", 1.5}, {"betas", {1, 2, 4}},
                        {"seeds", {1, 2, 3}}};
const json kChain = {{"env", "chain11"}, {"beta", 1.5}, {"seeds", {1, 2, 3}}};

Outcome sandwich_exactness() {
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> beta_dist(1.0, 3.0);
  std::vector<GridEnv> presets;
  for (const std::string& n : preset_names()) presets.push_back(build_preset(n));
  int ok = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t pick = gen() % (presets.size() + 1);
    const TabularMdp m =
        pick < presets.size() ? presets[pick].mdp : oracle::random_mdp(gen, 4, 6, 3);
    const ValueTable vs = exact_optimal_values(m);
    const double beta = beta_dist(gen);
    CounterRng rng(gen());
    const ShapingTable sh = build_sandwiched(vs, beta, rng);
    bool exact = verify_sandwich(sh, vs).holds;
    for (std::size_t g = 0; g < vs.v.size(); ++g) {
      exact = exact && sh.at(g) <= vs.v[g] && vs.v[g] <= beta * sh.at(g);
    }
    ok += exact;
  }
  return {ok == 50, std::to_string(ok) + "/50 triples"};
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const TabularMdp m = oracle::random_mdp(gen, 1 + i % 4, 6, 3);
    const ValueTable vs = exact_optimal_values(m);
    const StateLayout& L = m.layout();
    Policy pi(L);
    for (int h = 0; h < m.horizon(); ++h) {
      for (StateIndex s = 0; s < L.layer_size(h); ++s) {
        pi.set(h, s, static_cast<int>(gen() % static_cast<unsigned>(m.actions())));
      }
    }
    const ValueTable pv = policy_value(m, pi);
    for (int h = 0; h <= m.horizon(); ++h) {
      for (StateIndex s = 0; s < L.layer_size(h); ++s) {
        worst = std::max(worst, std::abs(vs.value(h, s) - oracle::enumerate_optimal(m, h, s)));
        worst = std::max(worst, std::abs(pv.value(h, s) - oracle::enumerate_policy(m, pi, h, s)));
      }
    }
  }
  return {worst <= 1e-10, "100 MDPs, max abs error " + fmt("%.3g", worst)};
}

Outcome optimism() {
  const GridEnv env = build_preset("corridor10");
  const ValueTable vs = exact_optimal_values(env.mdp);
  BonusSpec spec;
  spec.kind = BonusKind::kTheoreticalShaped;
  spec.delta = 0.05;
  spec.beta = 1.5;
  Outcome o;
  for (std::uint64_t seed : {1, 2, 3}) {
    const ShapingTable sh = seeded_shaping(env.mdp, vs, 1.5, 0.0, seed);
    CounterRng rng = seeded_run_rng(seed);
    const RegretTrace tr = run(env.mdp, Variant::kShaped, spec, sh, 2000, rng);
    std::size_t held = 0;
    for (const EpisodeRecord& e : tr.episodes) held += e.optimism_holds;
    const double frac = static_cast<double>(held) / 2000.0;
    o.pass = o.pass && frac >= 0.95;
    o.detail += "seed" + std::to_string(seed) + "=" + fmt("%.4f", frac) + " ";
  }
  o.detail += "(need >= 0.95)";
  return o;
}

Outcome pruning_soundness() {
  int checks = 0, failures = 0;
  for (const std::string& name : preset_names()) {
    const GridEnv env = build_preset(name);
    const TabularMdp& m = env.mdp;
    const StateLayout& L = m.layout();
    const ValueTable vs = exact_optimal_values(m);
    const ShapingTable sh = seeded_shaping(m, vs, 1.5, 0.0, 1);
    const IndexSet support = occupancy_support(m, greedy_policy(vs));
    const IndexSet reach = reachable_states(m);
    PruneOptions opts;
    opts.beta = 1.5;
    const std::vector<double> grid = geometric_grid(0.1, m.horizon(), 8);
    const std::vector<PruneReport> reps = delta_sweep(m, sh, grid, opts);
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const PruneReport& r = reps[i];
      bool disjoint = true, neighbors = true, monotone = true;
      for (std::size_t p : support.members()) {
        if (r.path_pseudosub.contains(p / static_cast<std::size_t>(L.actions()))) disjoint = false;
      }
      for (int h = 0; h < L.horizon(); ++h) {
        for (StateIndex s = 0; s < L.layer_size(h); ++s) {
          const std::size_t g = L.global(h, s);
          if (!reach.contains(g) || r.path_pseudosub.contains(g)) continue;
          for (int a = 0; a < L.actions(); ++a) {
            if (r.pseudosub.contains(L.pair(h, s, a))) continue;
            for (const Transition& t : m.successors(h, s, a)) {
              if (t.prob > 0.0 && r.path_pseudosub.contains(L.global(h + 1, t.next))) {
                neighbors = false;
              }
            }
          }
        }
      }
      if (i > 0) {
        monotone = r.pseudosub.is_subset_of(reps[i - 1].pseudosub) &&
                   r.path_pseudosub.is_subset_of(reps[i - 1].path_pseudosub);
      }
      checks += 3;
      failures += !disjoint + !neighbors + !monotone;
    }
  }
  return {failures == 0,
          std::to_string(checks - failures) + "/" + std::to_string(checks) + " set checks"};
}

Outcome regret_ordering() {
  const json s = job("run", "dcorridor_run", kCorridorRun);
  const auto mean = [&](const char* v) {
    return s["variants"][v]["final_cumulative_regret"]["mean"].get<double>();
  };
  const double shaped = mean("Shaped"), shaped_p = mean("Shaped-P"), ucbvi = mean("UCBVI");
  const bool a = shaped < shaped_p, b = shaped_p <= ucbvi, c = shaped < 0.8 * ucbvi;
  return {a && b && c, "mean regret Shaped=" + fmt("%.1f", shaped) + " Shaped-P=" +
                           fmt("%.1f", shaped_p) + " UCBVI=" + fmt("%.1f", ucbvi) +
                           "; Shaped<Shaped-P " + (a ? "yes" : "NO") + ", Shaped-P<=UCBVI " +
                           (b ? "yes" : "NO") + ", Shaped<0.8*UCBVI " + (c ? "yes" : "NO")};
}

// Reads the late-episode heatmaps written by the criterion 5 job.
Outcome exploration_asymmetry() {
  const fs::path dir = kRoot / "dcorridor_run";
  if (!fs::exists(dir / "heatmap_late_Shaped_seed1.csv")) job("run", "dcorridor_run", kCorridorRun);
  const int half = build_preset("dcorridor10x20").width / 2;
  const auto far_mass = [&](const std::string& file) {
    std::istringstream in(slurp(dir / file));
    std::string line;
    std::getline(in, line);
    double mass = 0.0;
    while (std::getline(in, line)) {
      int row, col;
      unsigned long long v;
      if (std::sscanf(line.c_str(), "%d,%d,%llu", &row, &col, &v) == 3 && col >= half) mass += v;
    }
    return mass;
  };
  Outcome o;
  for (int seed = 1; seed <= 3; ++seed) {
    const std::string tag = "_seed" + std::to_string(seed) + ".csv";
    const double shaped = far_mass("heatmap_late_Shaped" + tag);
    const double ucbvi = far_mass("heatmap_late_UCBVI" + tag);
    const double ratio = ucbvi > 0.0 ? shaped / ucbvi : (shaped > 0.0 ? INFINITY : 0.0);
    o.pass = o.pass && ratio < 0.25;
    o.detail += "seed" + std::to_string(seed) + " " + fmt("%.0f", shaped) + "/" +
                fmt("%.0f", ucbvi) + "=" + fmt("%.4f", ratio) + " ";
  }
  o.detail += "(need < 0.25)";
  return o;
}

Outcome corrupted_decay() {
  const json s = job("decay", "decay", kDecayJob);
  int ok = 0;
  std::string detail;
  for (const char* seed : {"1", "2", "3"}) {
    const double add = s["runs"][seed]["Additive"]["final_return"].get<double>();
    const double shaped = s["runs"][seed]["Shaped"]["final_return"].get<double>();
    ok += add == 0.0 && shaped > 0.0;
    detail += std::string("seed") + seed + " Additive=" + fmt("%g", add) + " Shaped=" +
              fmt("%g", shaped) + " ";
  }
  return {ok == 3, detail + "(" + std::to_string(ok) + "/3)"};
}

Outcome online_selection() {
  const json s = job("modelsel", "modelsel", kModelselJob);
  Outcome o;
  for (const char* seed : {"1", "2", "3"}) {
    const double online = s["per_seed"][seed]["online"].get<double>();
    const double best = s["per_seed"][seed]["best_fixed"].get<double>();
    o.pass = o.pass && online <= 2.0 * best;
    o.detail += std::string("seed") + seed + " online=" + fmt("%.1f", online) + " best=" +
                fmt("%.1f", best) + " ";
  }
  o.detail += "(need online <= 2x best fixed)";
  return o;
}

// Path fraction recomputed by open-loop path enumeration at the chosen delta.
double oracle_path_fraction(const TabularMdp& m, const IndexSet& pseudo) {
  const StateLayout& L = m.layout();
  IndexSet seen(L.state_count()), free(L.state_count());
  oracle::for_each_path(m, [&](const std::vector<StateIndex>& st, const std::vector<int>& ac) {
    bool clean = true;
    for (std::size_t k = 0; k < st.size(); ++k) {
      seen.insert(L.global(static_cast<int>(k), st[k]));
      if (clean) free.insert(L.global(static_cast<int>(k), st[k]));
      if (k < ac.size() && pseudo.contains(L.pair(static_cast<int>(k), st[k], ac[k]))) {
        clean = false;
      }
    }
  });
  std::size_t path = 0;
  for (std::size_t g : seen.members()) path += !free.contains(g);
  return static_cast<double>(path) / static_cast<double>(seen.size());
}

Outcome chain_pruning() {
  // Frozen from the first run of the pruning oracle: 55, 54 and 56 of the 89
  // reachable states.
  const std::map<std::string, double> frozen = {
      {"1", 55.0 / 89.0}, {"2", 54.0 / 89.0}, {"3", 56.0 / 89.0}};
  const json s = job("prune", "chain", kChain);
  const GridEnv env = build_preset("chain11");
  const ValueTable vs = exact_optimal_values(env.mdp);
  Outcome o;
  for (const auto& [seed, expected] : frozen) {
    const json& b = s["seeds_best"][seed];
    const double frac = b["path_fraction"].get<double>();
    const double delta = b["best_delta"].get<double>();
    const ShapingTable sh = seeded_shaping(env.mdp, vs, 1.5, 0.0, std::stoull(seed));
    const SurrogateQ q = surrogate_q(env.mdp, sh, 1.5);
    const double oracle = oracle_path_fraction(env.mdp, pseudosub(vs, q.upper, delta));
    const bool ok = frac >= 0.3 && std::abs(frac - oracle) < 1e-12 &&
                    std::abs(frac - expected) < 1e-9;
    o.pass = o.pass && ok;
    o.detail += "seed" + seed + " delta=" + fmt("%.4g", delta) + " fraction=" +
                fmt("%.4f", frac) + " oracle=" + fmt("%.4f", oracle) + " ";
  }
  o.detail += "(need >= 0.3, frozen regression)";
  return o;
}

Outcome determinism() {
  struct Rerun {
    const char* command;
    const char* dir;
    const json* config;
  };
  const Rerun jobs[] = {{"run", "dcorridor_run", &kCorridorRun},
                        {"decay", "decay", &kDecayJob},
                        {"modelsel", "modelsel", &kModelselJob},
                        {"prune", "chain", &kChain}};
  Outcome o;
  for (const Rerun& r : jobs) {
    if (!fs::exists(kRoot / r.dir)) job(r.command, r.dir, *r.config);
    const std::string again = std::string(r.dir) + "_again";
    job(r.command, again, *r.config);
    const auto first = tree(kRoot / r.dir);
    const bool same = !first.empty() && first == tree(kRoot / again);
    o.pass = o.pass && same;
    o.detail += std::string(r.dir) + (same ? " identical " : " DIFFERS ") + "(" +
                std::to_string(first.size()) + " files) ";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "sandwich exactness", 5, sandwich_exactness},
      {2, "oracle equivalence", 10, oracle_equivalence},
      {3, "empirical optimism", 30, optimism},
      {4, "pruning soundness", 10, pruning_soundness},
      {5, "double corridor regret ordering", 120, regret_ordering},
      {6, "exploration asymmetry", 120, exploration_asymmetry},
      {7, "decay with corrupted shaping", 60, corrupted_decay},
      {8, "online beta selection", 180, online_selection},
      {9, "chain pruning fraction", 5, chain_pruning},
      {10, "determinism", 600, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s [%.1fs, limit %.0fs%s]\n", pass ? "PASS" : "FAIL",
                c.id, c.name, o.detail.c_str(), secs, c.time_limit_s,
                in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
