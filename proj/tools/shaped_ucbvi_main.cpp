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

// shaped-ucbvi {run|sweep|prune|modelsel|decay} --config FILE [--flag ...]
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shaped_ucbvi.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::string env;
  std::vector<std::string> variants;
  std::string bonus;
  double c = 0.0;
  double confidence = 0.0;
  double beta = 0.0;
  double corrupt_sigma = 0.0;
  std::int64_t episodes = 0;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::vector<double> deltas;
  std::vector<double> betas;
  std::vector<double> sigmas;
  bool members = false;
  bool gnuplot = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--env", f.env, "preset name");
  cmd->add_option("--variants", f.variants, "comma-separated variants")->delimiter(',');
  cmd->add_option("--bonus", f.bonus, "bonus kind: practical or theoretical");
  cmd->add_option("--c", f.c, "practical bonus scale");
  cmd->add_option("--confidence", f.confidence, "confidence delta inside the bonus");
  cmd->add_option("--beta", f.beta, "sandwich factor");
  cmd->add_option("--corrupt-sigma", f.corrupt_sigma, "shaping noise standard deviation");
  cmd->add_option("--episodes", f.episodes, "episodes per run");
  cmd->add_option("--seeds", f.seeds, "comma-separated seeds")->delimiter(',');
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--deltas", f.deltas, "pruning deltas")->delimiter(',');
  cmd->add_option("--betas", f.betas, "beta grid (modelsel) or swept betas (sweep)")
      ->delimiter(',');
  cmd->add_option("--sigmas", f.sigmas, "swept noise levels")->delimiter(',');
  cmd->add_flag("--members", f.members, "list set members in prune reports");
  cmd->add_flag("--gnuplot", f.gnuplot, "also write gnuplot scripts");
}

nlohmann::json overrides(const CLI::App* cmd, const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  const auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--env")) j["env"] = f.env;
  if (given("--variants")) j["variants"] = f.variants;
  if (given("--bonus")) j["bonus"]["kind"] = f.bonus;
  if (given("--c")) j["bonus"]["c"] = f.c;
  if (given("--confidence")) j["bonus"]["delta"] = f.confidence;
  if (given("--beta")) j["beta"] = f.beta;
  if (given("--corrupt-sigma")) j["corrupt_sigma"] = f.corrupt_sigma;
  if (given("--episodes")) j["episodes"] = f.episodes;
  if (given("--seeds")) j["seeds"] = f.seeds;
  if (given("--out")) j["output_dir"] = f.out;
  if (given("--deltas")) j["deltas"] = f.deltas;
  if (given("--betas")) j["betas"] = f.betas;
  if (given("--sigmas")) j["sigmas"] = f.sigmas;
  if (given("--members")) j["members"] = true;
  if (given("--gnuplot")) j["gnuplot"] = true;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimistic value iteration with value shaping: experiments"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"run", "sweep", "prune", "modelsel", "decay"}) {
    add_flags(app.add_subcommand(name), flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const CLI::App* cmd = app.get_subcommands().front();

  std::string config = "{}";
  if (!flags.config.empty()) {
    std::ifstream in(flags.config, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config file " << flags.config << "\n";
      return kExitConfig;
    }
    std::ostringstream text;
    text << in.rdbuf();
    config = text.str();
  }
  const std::string patch = overrides(cmd, flags).dump();

  char* summary = nullptr;
  const sucbvi_status status =
      sucbvi_command(cmd->get_name().c_str(), config.c_str(), patch.c_str(), &summary);
  if (status != SUCBVI_OK) {
    std::cerr << "error (" << sucbvi_status_name(status) << "): " << sucbvi_last_error()
              << "\n";
    return status == SUCBVI_CONFIG ? kExitConfig : kExitRuntime;
  }
  std::cout << summary;
  sucbvi_string_free(summary);
  return 0;
}
