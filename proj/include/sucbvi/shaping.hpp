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

#include <string>
#include <vector>

#include "sucbvi/mdp.hpp"
#include "sucbvi/rng.hpp"

namespace sucbvi {

/// Shaping values over (h, s), with the sandwich factor they were built for.
class ShapingTable {
 public:
  ShapingTable() = default;
  ShapingTable(const StateLayout& layout, std::vector<double> values, double beta);

  const StateLayout& layout() const noexcept { return layout_; }
  double at(int h, StateIndex s) const { return values_[layout_.global(h, s)]; }
  double at(std::size_t global_id) const { return values_[global_id]; }
  const std::vector<double>& values() const noexcept { return values_; }
  double beta() const noexcept { return beta_; }
  /// Maximum over every (h, s).
  double vmax() const noexcept { return vmax_; }
  /// Maximum over layer h.
  double layer_max(int h) const { return layer_max_[h]; }

 private:
  StateLayout layout_;
  std::vector<double> values_;
  std::vector<double> layer_max_;
  double beta_ = 1.0;
  double vmax_ = 0.0;
};

/// V~ = V* / c with c ~ U[1, beta] drawn per (h, s). The result satisfies
/// V~ <= V* <= beta V~ exactly in floating point.
ShapingTable build_sandwiched(const ValueTable& vstar, double beta, CounterRng& rng);

/// V~' = max(0, V~ + sigma * N(0, 1)) per entry. May break the sandwich.
ShapingTable corrupt(const ShapingTable& table, double sigma, CounterRng& rng);

struct SandwichReport {
  bool holds = true;
  /// max over states with V* > 0 of V* / V~ (infinite if V~ = 0 there).
  double worst_ratio = 1.0;
  /// Global ids of states where V~ <= V* <= beta V~ fails.
  std::vector<std::size_t> violating_states;
};

SandwichReport verify_sandwich(const ShapingTable& table, const ValueTable& vstar);

/// {"beta": b, "vmax": m, "values": {"<h>": {"<state name>": v}}}
std::string shaping_to_json(const ShapingTable& table, const TabularMdp& mdp);
ShapingTable shaping_from_json(const std::string& text, const TabularMdp& mdp);

}  // namespace sucbvi
