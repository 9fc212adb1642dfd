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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "sucbvi/error.hpp"
#include "sucbvi/harness.hpp"

using namespace sucbvi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& label) {
  const fs::path p = fs::temp_directory_path() / ("sucbvi-test-" + label);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

ExperimentConfig config_for(const std::string& json, const fs::path& out) {
  ExperimentConfig c = ExperimentConfig::from_json(json);
  c.output_dir = out;
  return c;
}

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  const ExperimentConfig c = ExperimentConfig::from_json("{}");
  CHECK(c.env_name == "grid8");
  CHECK(c.episode_count() == 2000);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  const ExperimentConfig d = ExperimentConfig::from_json(R"({
    "env": "corridor10",
    "variants": ["UCBVI", "Shaped-P", "Additive"],
    "bonus": {"kind": "theoretical", "delta": 0.1},
    "beta": 2,
    "episodes": 10,
    "seeds": [7]
  })");
  CHECK(d.env_name == "corridor10");
  CHECK(d.variants.size() == 3);
  CHECK(d.bonus.kind == BonusKind::kTheoreticalVanilla);
  CHECK(d.bonus.delta == 0.1);
  CHECK(d.beta == 2.0);
  CHECK(d.episode_count() == 10);
  CHECK(default_episodes("dcorridor10x20") == 5000);
  CHECK(default_episodes("chain11") == 2000);
}

TEST_CASE("config overrides") {
  const ExperimentConfig c =
      ExperimentConfig::from_json(R"({"env": "grid8", "beta": 2})", R"({"beta": 3, "seeds": [4]})");
  CHECK(c.beta == 3.0);
  CHECK(c.seeds == std::vector<std::uint64_t>{4});
}

TEST_CASE("inline maze") {
  const ExperimentConfig c = ExperimentConfig::from_json(R"({
    "env": {"name": "tiny", "rows": ["G.#", "..S"], "horizon": 5},
    "episodes": 3, "seeds": [1]
  })");
  const GridEnv env = c.build_env();
  CHECK(env.name == "tiny");
  CHECK(env.mdp.horizon() == 5);
  CHECK(env.cells.size() == 5);
}

TEST_CASE("config errors name the line") {
  std::string msg;
  CHECK(code_of([] { ExperimentConfig::from_json("{\n  \"env\": \"grid8\",\n  \"bogus\": 1\n}"); },
                &msg) == ErrorCode::kConfig);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("bogus") != std::string::npos);
  CHECK(code_of([] { ExperimentConfig::from_json("{\n  \"beta\": \"high\"\n}"); }, &msg) ==
        ErrorCode::kConfig);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(code_of([] { ExperimentConfig::from_json("{\n  \"env\": \n}"); }, &msg) ==
        ErrorCode::kConfig);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(code_of([] { ExperimentConfig::from_json(R"({"variants": ["UCB"]})"); }) ==
        ErrorCode::kConfig);
  CHECK(code_of([] { ExperimentConfig::from_json(R"({"seeds": []})"); }) == ErrorCode::kConfig);
  CHECK(code_of([] { ExperimentConfig::from_json(R"({"beta": 0.5})"); }) == ErrorCode::kConfig);
  CHECK(code_of([] {
          cmd_run(config_for(R"({"env": "nowhere", "episodes": 1})", scratch("nowhere")));
        }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_command("fly", ExperimentConfig{}); }) == ErrorCode::kConfig);
}

TEST_CASE("a single episode writes a single row") {
  const fs::path out = scratch("one");
  cmd_run(config_for(R"({"env": "grid8", "variants": ["UCBVI"], "episodes": 1, "seeds": [1]})",
                     out));
  const std::vector<std::string> rows = lines(slurp(out / "regret_UCBVI_seed1.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "episode,instant_regret,cumulative_regret,episodic_return,optimism_holds");
  CHECK(rows[1].rfind("1,", 0) == 0);
}

TEST_CASE("run writes per-seed traces and matching aggregates") {
  const fs::path out = scratch("run");
  const CommandOutput res =
      cmd_run(config_for(R"({"env": "grid8", "episodes": 100, "gnuplot": true})", out));
  for (const char* v : {"UCBVI", "Shaped"}) {
    std::vector<std::vector<std::string>> per_seed;
    for (int s = 1; s <= 3; ++s) {
      const std::string tag = std::string(v) + "_seed" + std::to_string(s);
      CHECK(fs::exists(out / ("heatmap_" + tag + ".csv")));
      CHECK(fs::exists(out / ("heatmap_late_" + tag + ".csv")));
      per_seed.push_back(lines(slurp(out / ("regret_" + tag + ".csv"))));
      REQUIRE(per_seed.back().size() == 101);
    }
    const std::vector<std::string> agg = lines(slurp(out / ("aggregate_" + std::string(v) + ".csv")));
    REQUIRE(agg.size() == 101);
    CHECK(agg[0] == "episode,mean_cumulative_regret,stderr_cumulative_regret");
    for (std::size_t t = 1; t <= 100; ++t) {
      double sum = 0.0;
      for (const auto& rows : per_seed) {
        std::istringstream in(rows[t]);
        std::string ep, inst, cum;
        std::getline(in, ep, ',');
        std::getline(in, inst, ',');
        std::getline(in, cum, ',');
        sum += std::stod(cum);
      }
      std::istringstream in(agg[t]);
      std::string ep, mean;
      std::getline(in, ep, ',');
      std::getline(in, mean, ',');
      CHECK(std::stoul(ep) == t);
      CHECK(std::stod(mean) == doctest::Approx(sum / 3.0).epsilon(1e-12));
    }
  }
  CHECK(fs::exists(out / "plot_regret.gp"));
  const nlohmann::json summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(slurp(out / "summary.json") == res.summary_json);
  CHECK(summary["variants"]["Shaped"]["final_cumulative_regret"]["per_seed"].size() == 3);
  std::size_t regret_files = 0;
  for (const fs::path& f : res.files) regret_files += f.string().rfind("regret_", 0) == 0;
  CHECK(regret_files == 6);
}

TEST_CASE("reruns are byte-identical across commands and thread counts") {
  const std::string base = R"({"env": "grid8", "episodes": 60, "seeds": [1, 2],
                              "betas": [1, 2], "sigmas": [0, 0.5], "deltas": [0.5, 2]})";
  for (const char* cmd : {"run", "sweep", "prune", "modelsel", "decay"}) {
    const fs::path a = scratch(std::string("det-a-") + cmd);
    const fs::path b = scratch(std::string("det-b-") + cmd);
    ::setenv("SHAPED_UCBVI_THREADS", "1", 1);
    run_command(cmd, config_for(base, a));
    ::unsetenv("SHAPED_UCBVI_THREADS");
    run_command(cmd, config_for(base, b));
    const auto ta = tree(a);
    CHECK(ta.size() > 1);
    CHECK(ta == tree(b));
  }
}

TEST_CASE("sweep without grids is run") {
  const fs::path a = scratch("sweep-empty");
  const fs::path b = scratch("sweep-run");
  const std::string cfg = R"({"env": "chain11", "episodes": 50, "seeds": [3]})";
  const CommandOutput s = cmd_sweep(config_for(cfg, a));
  const CommandOutput r = cmd_run(config_for(cfg, b));
  CHECK(s.summary_json == r.summary_json);
  CHECK(tree(a) == tree(b));
}

TEST_CASE("sweep cells and the long table") {
  const fs::path out = scratch("sweep");
  cmd_sweep(config_for(R"({"env": "chain11", "episodes": 20, "seeds": [1, 2],
                          "variants": ["Shaped"], "betas": [1.5, 3], "sigmas": [0]})",
                       out));
  CHECK(fs::exists(out / "beta1p5_sigma0" / "regret_Shaped_seed2.csv"));
  CHECK(fs::exists(out / "beta3_sigma0" / "aggregate_Shaped.csv"));
  const std::vector<std::string> rows = lines(slurp(out / "sweep_long.csv"));
  CHECK(rows.size() == 1 + 2 * 20);
  CHECK(rows[1].rfind("1.5,0,Shaped,1,", 0) == 0);
}

TEST_CASE("a one-point modelsel grid matches the fixed arm and the run") {
  const fs::path a = scratch("ms-one");
  const fs::path b = scratch("ms-run");
  const std::string cfg =
      R"({"env": "grid8", "episodes": 80, "seeds": [2], "beta": 1.5, "betas": [1.5],
          "variants": ["Shaped"]})";
  const CommandOutput ms = cmd_modelsel(config_for(cfg, a));
  cmd_run(config_for(cfg, b));
  CHECK(slurp(a / "modelsel_fixed_beta1p5_seed2.csv") == slurp(b / "regret_Shaped_seed2.csv"));
  const nlohmann::json s = nlohmann::json::parse(ms.summary_json);
  CHECK(s["per_seed"]["2"]["online"] == s["per_seed"]["2"]["best_fixed"]);
  CHECK(s["per_seed"]["2"]["ratio"] == 1.0);
  const std::vector<std::string> online = lines(slurp(a / "modelsel_online_seed2.csv"));
  CHECK(online.size() == 81);
  CHECK(online[0].find("arm") != std::string::npos);
}

TEST_CASE("prune and decay outputs") {
  const fs::path out = scratch("prune");
  const CommandOutput p =
      cmd_prune(config_for(R"({"env": "chain11", "seeds": [1], "members": true})", out));
  const nlohmann::json s = nlohmann::json::parse(p.summary_json);
  CHECK(s["deltas"].size() == 8);
  const std::vector<std::string> table = lines(slurp(out / "prune_seed1.csv"));
  CHECK(table.size() == 9);
  int best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) best += table[i].back() == '1';
  CHECK(best == 1);
  CHECK(nlohmann::json::parse(slurp(out / "prune_seed1_delta0.json")).contains("members"));
  CHECK(s["seeds_best"]["1"]["path_fraction"].get<double>() >= 0.0);

  const fs::path dout = scratch("decay");
  const CommandOutput d = cmd_decay(config_for(
      R"({"env": "grid8", "episodes": 30, "seeds": [1], "corrupt_sigma": 0.5})", dout));
  CHECK(fs::exists(dout / "decay_Shaped_seed1.csv"));
  CHECK(fs::exists(dout / "decay_Additive_seed1.csv"));
  const nlohmann::json ds = nlohmann::json::parse(d.summary_json);
  CHECK(ds["runs"]["1"]["Shaped"].contains("reached_goal"));
}

TEST_CASE("thread cap from the environment") {
  ::setenv("SHAPED_UCBVI_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  ::setenv("SHAPED_UCBVI_THREADS", "3", 1);
  CHECK(worker_count() >= 1);
  CHECK(worker_count() <= 3);
  ::unsetenv("SHAPED_UCBVI_THREADS");
  CHECK(worker_count() >= 1);
}
