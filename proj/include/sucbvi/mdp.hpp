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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sucbvi/rng.hpp"

namespace sucbvi {

/// Index of a state inside its layer.
using StateIndex = std::uint32_t;

/// Index arithmetic for a layered state space with layers 0..H.
///
/// States are addressed as (h, local index). A flat global id covers all H+1
/// layers; pair ids (h, s, a) exist only for decision layers h < H.
class StateLayout {
 public:
  StateLayout() = default;
  StateLayout(int horizon, int actions, std::span<const std::size_t> layer_sizes);

  int horizon() const noexcept { return horizon_; }
  int actions() const noexcept { return actions_; }
  std::size_t layer_size(int h) const { return offsets_[h + 1] - offsets_[h]; }
  /// Total number of states over all H+1 layers.
  std::size_t state_count() const noexcept { return offsets_.back(); }
  /// Number of states in decision layers 0..H-1.
  std::size_t decision_state_count() const noexcept { return offsets_[horizon_]; }
  std::size_t pair_count() const noexcept {
    return decision_state_count() * static_cast<std::size_t>(actions_);
  }

  std::size_t global(int h, StateIndex s) const noexcept { return offsets_[h] + s; }
  std::size_t pair(int h, StateIndex s, int a) const noexcept {
    return global(h, s) * static_cast<std::size_t>(actions_) +
           static_cast<std::size_t>(a);
  }
  std::size_t layer_offset(int h) const noexcept { return offsets_[h]; }
  /// Inverse of global(): the layer containing a global id.
  int layer_of(std::size_t global_id) const;

  bool operator==(const StateLayout&) const = default;

 private:
  int horizon_ = 0;
  int actions_ = 0;
  std::vector<std::size_t> offsets_{0};
};

/// Membership bitmap over a dense id range (global states or pairs).
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t universe) : bits_(universe, 0) {}

  std::size_t universe() const noexcept { return bits_.size(); }
  bool contains(std::size_t i) const { return bits_[i] != 0; }
  void insert(std::size_t i) {
    if (!bits_[i]) {
      bits_[i] = 1;
      ++count_;
    }
  }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::vector<std::size_t> members() const;
  bool is_subset_of(const IndexSet& other) const;

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<char> bits_;
  std::size_t count_ = 0;
};

struct Transition {
  StateIndex next;  // local index in layer h+1
  double prob;
};

/// Layered finite-horizon MDP with known rewards in [0, 1].
///
/// Immutable once built; construct through MdpBuilder, which validates the
/// stochasticity, layering and reward-range invariants.
class TabularMdp {
 public:
  const StateLayout& layout() const noexcept { return layout_; }
  int horizon() const noexcept { return layout_.horizon(); }
  int actions() const noexcept { return layout_.actions(); }
  std::size_t layer_size(int h) const { return layout_.layer_size(h); }
  StateIndex start() const noexcept { return start_; }

  double reward(int h, StateIndex s, int a) const {
    return rewards_[layout_.pair(h, s, a)];
  }
  double reward(std::size_t pair) const { return rewards_[pair]; }
  std::span<const Transition> successors(int h, StateIndex s, int a) const {
    return successors(layout_.pair(h, s, a));
  }
  std::span<const Transition> successors(std::size_t pair) const {
    return {transitions_.data() + row_begin_[pair],
            row_begin_[pair + 1] - row_begin_[pair]};
  }

  const std::string& name(int h, StateIndex s) const {
    return names_[layout_.global(h, s)];
  }
  std::optional<StateIndex> find(int h, const std::string& name) const;

 private:
  friend class MdpBuilder;

  StateLayout layout_;
  StateIndex start_ = 0;
  std::vector<std::string> names_;       // by global id
  std::vector<double> rewards_;          // by pair id
  std::vector<std::size_t> row_begin_;   // pair id -> offset into transitions_
  std::vector<Transition> transitions_;  // CSR rows, sorted by next
};

class MdpBuilder {
 public:
  /// layers[h] lists the state names of layer h, for h = 0..horizon.
  MdpBuilder(int horizon, int actions, std::vector<std::vector<std::string>> layers);

  MdpBuilder& set_start(StateIndex s);
  /// Defines r(s, a) and P(.|s, a) at step h. Duplicate successors are merged.
  MdpBuilder& set(int h, StateIndex s, int a, double reward,
                  std::vector<Transition> successors);

  /// Validates and produces the MDP; throws Error(kInvalidMdp) on any
  /// missing row, out-of-layer successor, bad distribution or reward.
  TabularMdp build() const;

 private:
  int horizon_;
  int actions_;
  std::vector<std::vector<std::string>> layers_;
  StateIndex start_ = 0;
  StateLayout layout_;
  std::vector<std::optional<std::pair<double, std::vector<Transition>>>> rows_;
};

enum class ValueKind { kOptimal, kEmpirical, kShaping, kSurrogateUpper, kSurrogateLower, kPolicy };

const char* value_kind_name(ValueKind kind) noexcept;

/// Per-(h, s) values and per-(h, s, a) action values over a layout.
struct ValueTable {
  ValueTable() = default;
  ValueTable(ValueKind kind, const StateLayout& layout)
      : kind(kind),
        layout(layout),
        v(layout.state_count(), 0.0),
        q(layout.pair_count(), 0.0) {}

  double value(int h, StateIndex s) const { return v[layout.global(h, s)]; }
  double action_value(int h, StateIndex s, int a) const {
    return q[layout.pair(h, s, a)];
  }

  ValueKind kind = ValueKind::kOptimal;
  StateLayout layout;
  std::vector<double> v;  // by global id, layer H included (always 0 there)
  std::vector<double> q;  // by pair id
};

/// Deterministic Markov policy over decision layers.
class Policy {
 public:
  Policy() = default;
  explicit Policy(const StateLayout& layout)
      : layout_(layout), choice_(layout.decision_state_count(), 0) {}

  const StateLayout& layout() const noexcept { return layout_; }
  int action(int h, StateIndex s) const { return choice_[layout_.global(h, s)]; }
  int action(std::size_t global_id) const { return choice_[global_id]; }
  void set(int h, StateIndex s, int a) {
    choice_[layout_.global(h, s)] = static_cast<std::uint8_t>(a);
  }

  bool operator==(const Policy&) const = default;

 private:
  StateLayout layout_;
  std::vector<std::uint8_t> choice_;
};

struct Step {
  int h;
  StateIndex state;
  int action;
  double reward;
  StateIndex next_state;
};

struct Trajectory {
  std::vector<Step> steps;
  double episodic_return = 0.0;
};

/// Backward induction for V* and Q*; V*_H = 0.
ValueTable exact_optimal_values(const TabularMdp& mdp);

/// Exact evaluation of a deterministic policy by backward induction.
ValueTable policy_value(const TabularMdp& mdp, const Policy& pi);

/// Value of pi at the start state only. Same recursion as policy_value
/// without materialising Q; used once per episode by the learners.
double start_value(const TabularMdp& mdp, const Policy& pi, std::vector<double>& scratch);

/// Greedy policy over a Q table; ties go to the lowest action index.
Policy greedy_policy(const ValueTable& values);

/// Rolls pi out for H steps from the start state.
Trajectory sample_trajectory(const TabularMdp& mdp, const Policy& pi, CounterRng& rng);

/// Pairs (h, s, a) with positive occupancy under pi, by forward propagation
/// of reach probabilities. Indexed by pair id.
IndexSet occupancy_support(const TabularMdp& mdp, const Policy& pi);

/// Global ids of all states reachable from the start state through
/// positive-probability transitions, under any action.
IndexSet reachable_states(const TabularMdp& mdp);

/// JSON document form:
///   {"H": int, "A": int, "layers": [[name, ...], ...], "start": name,
///    "transitions": {"<h>": {"<name>": [{"<next>": p, ...}, ... per action]}},
///    "rewards":     {"<h>": {"<name>": [r, ... per action]}}}
std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);

}  // namespace sucbvi
