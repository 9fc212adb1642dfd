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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sucbvi/environments.hpp"
#include "sucbvi/learner.hpp"

namespace sucbvi {

/// Experiment description, read from JSON:
///   {"env": "grid8" | {"name", "rows": [...], "horizon"},
///    "variants": ["UCBVI", "Shaped", ...],
///    "bonus": {"kind", "c", "delta"},
///    "beta", "corrupt_sigma", "episodes", "seeds": [...], "output_dir",
///    "deltas": [...], "betas": [...], "sigmas": [...],
///    "members": bool, "gnuplot": bool}
/// "betas" is the beta grid for modelsel and the swept values for sweep.
struct ExperimentConfig {
  std::string env_name = "grid8";
  std::optional<MazeSpec> maze;  // set when env is given inline
  std::vector<Variant> variants{Variant::kUcbvi, Variant::kShaped};
  BonusSpec bonus;
  double beta = 1.5;
  double corrupt_sigma = 0.0;
  std::optional<std::uint64_t> episodes;  // preset default when unset
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::filesystem::path output_dir = "out";
  std::vector<double> deltas;  // default: 8 points from 0.1 to H
  std::vector<double> betas;
  std::vector<double> sigmas;
  bool members = false;
  bool gnuplot = false;

  /// Parses and validates. Errors are kConfig with the offending line.
  static ExperimentConfig from_json(std::string_view text);
  /// Applies an override object (same keys) on top of a config document,
  /// then parses the result.
  static ExperimentConfig from_json(std::string_view text, std::string_view overrides);

  GridEnv build_env() const;
  std::uint64_t episode_count() const;
};

/// Default episode budget per environment: 2000 for grid8 and chains,
/// 5000 for the corridors and custom mazes.
std::uint64_t default_episodes(std::string_view env_name);

struct CommandOutput {
  std::string summary_json;
  std::vector<std::filesystem::path> files;  // relative to output_dir
};

CommandOutput cmd_run(const ExperimentConfig& config);
CommandOutput cmd_sweep(const ExperimentConfig& config);
CommandOutput cmd_prune(const ExperimentConfig& config);
CommandOutput cmd_modelsel(const ExperimentConfig& config);
CommandOutput cmd_decay(const ExperimentConfig& config);

/// Dispatches by name: run, sweep, prune, modelsel, decay.
CommandOutput run_command(std::string_view name, const ExperimentConfig& config);

/// Worker count: hardware concurrency, capped by SHAPED_UCBVI_THREADS.
unsigned worker_count();

/// Per-seed streams, shared by the CLI, the C API and the tests.
ShapingTable seeded_shaping(const TabularMdp& mdp, const ValueTable& vstar, double beta,
                            double corrupt_sigma, std::uint64_t seed);
CounterRng seeded_run_rng(std::uint64_t seed);

}  // namespace sucbvi
