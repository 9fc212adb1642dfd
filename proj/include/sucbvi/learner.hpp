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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sucbvi/mdp.hpp"
#include "sucbvi/rng.hpp"
#include "sucbvi/shaping.hpp"

namespace sucbvi {

struct SuccessorCount {
  StateIndex next;
  std::uint32_t count;
};

/// Visitation counts N_h(s, a) and N_h(s, a, s').
class Counts {
 public:
  Counts() = default;
  explicit Counts(const StateLayout& layout);

  /// Adds one visit per step of the trajectory. Throws kLayerMismatch if a
  /// step is not in the layer its position implies.
  void update(const Trajectory& traj);

  const StateLayout& layout() const noexcept { return layout_; }
  std::uint32_t visits(std::size_t pair) const { return n_sa_[pair]; }
  std::uint32_t visits(int h, StateIndex s, int a) const {
    return n_sa_[layout_.pair(h, s, a)];
  }
  std::uint32_t visits(int h, StateIndex s, int a, StateIndex next) const;
  std::span<const SuccessorCount> successors(std::size_t pair) const { return n_sas_[pair]; }
  std::uint64_t total() const noexcept { return total_; }

 private:
  StateLayout layout_;
  std::vector<std::uint32_t> n_sa_;
  std::vector<std::vector<SuccessorCount>> n_sas_;  // sorted by next
  std::uint64_t total_ = 0;
};

/// Ratio estimator P^(s'|s,a) = N(s,a,s') / N(s,a), as a view over Counts.
/// The counts must outlive the view.
class EmpiricalModel {
 public:
  explicit EmpiricalModel(const Counts& counts) : counts_(&counts) {}

  const Counts& counts() const noexcept { return *counts_; }
  bool visited(std::size_t pair) const { return counts_->visits(pair) > 0; }
  /// Probability row, or nullopt for an unvisited pair.
  std::optional<std::vector<Transition>> row(int h, StateIndex s, int a) const;

  /// Sum over s' of P^(s'|pair) f(s'). Zero for unvisited pairs.
  template <class F>
  double expect(std::size_t pair, F&& f) const {
    const std::uint32_t n = counts_->visits(pair);
    if (n == 0) return 0.0;
    double acc = 0.0;
    for (const SuccessorCount& sc : counts_->successors(pair)) {
      acc += static_cast<double>(sc.count) * f(sc.next);
    }
    return acc / static_cast<double>(n);
  }

 private:
  const Counts* counts_;
};

enum class BonusKind {
  kTheoreticalShaped,
  kTheoreticalVanilla,
  kPracticalShaped,
  kPracticalVanilla,
  kAdditiveShaping,
  kNone,
};

struct BonusSpec {
  BonusKind kind = BonusKind::kPracticalVanilla;
  double c = 0.1;
  double delta = 0.05;
  double beta = 1.0;

  /// Throws kInvalidArgument unless delta is in (0, 1) and c >= 0.
  void validate() const;
};

const char* bonus_kind_name(BonusKind kind) noexcept;
BonusKind parse_bonus_kind(std::string_view name);
bool is_shaped(BonusKind kind) noexcept;

/// Exploration bonus b_h^t(s, a) for episode t >= 1.
///
/// Unvisited pairs get the cap: 2 beta V~max for the shaped kinds, 2H for
/// the vanilla ones. The shaped kinds throw kMissingShaping without a table.
double bonus(const BonusSpec& spec, const EmpiricalModel& model, const ShapingTable* shaping,
             int h, StateIndex s, int a, std::uint64_t t);

struct PlanOptions {
  /// Clip V^_h(s) at beta V~_h(s) when set.
  const ShapingTable* projection = nullptr;
  double projection_beta = 1.0;
  /// Unvisited pairs continue with the best next-layer value (true) or with
  /// nothing (false).
  bool optimistic_unvisited = true;
};

struct PlanResult {
  ValueTable values;  // kind empirical; v = V^, q = Q^
  Policy policy;
};

/// One backward pass of optimistic value iteration on the empirical model:
///   Q^ = min(r + b + P^ V^_{h+1}, H),  V^ = min(max_a Q^, beta V~)
/// with V^_H = 0 and lowest-index argmax.
PlanResult plan(const TabularMdp& mdp, const EmpiricalModel& model,
                std::span<const double> bonuses, const PlanOptions& options);

enum class Variant { kUcbvi, kShaped, kShapedBs, kShapedP, kAdditive };

const char* variant_name(Variant v) noexcept;
Variant parse_variant(std::string_view name);

/// Fills in the bonus kind a variant actually uses, keeping the family
/// (theoretical or practical) of the requested kind.
BonusSpec bonus_for_variant(Variant variant, BonusSpec spec);
bool uses_projection(Variant variant) noexcept;
bool needs_shaping(Variant variant) noexcept;

/// A UCBVI-family planner: bonus rule plus optional projection. It keeps no
/// data of its own; counts are passed in so several planners can share them.
class ShapedUcbvi {
 public:
  ShapedUcbvi(const TabularMdp& mdp, Variant variant, BonusSpec spec,
              std::optional<ShapingTable> shaping);

  Variant variant() const noexcept { return variant_; }
  const BonusSpec& bonus_spec() const noexcept { return spec_; }
  const ShapingTable* shaping() const noexcept { return shaping_ ? &*shaping_ : nullptr; }

  /// Plans for episode t (1-based) from the given counts.
  PlanResult plan_episode(const Counts& counts, std::uint64_t t) const;

 private:
  const TabularMdp* mdp_;
  Variant variant_;
  BonusSpec spec_;
  std::optional<ShapingTable> shaping_;
};

struct EpisodeRecord {
  std::uint64_t episode = 0;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
  double episodic_return = 0.0;
  bool optimism_holds = false;
  double planned_value = 0.0;  // V^_0(s0)
  int arm = 0;                 // model selection only
};

struct RegretTrace {
  std::vector<EpisodeRecord> episodes;
  double optimal_value = 0.0;
  /// Visits per global state over all episodes, and over the second half
  /// (episodes t > T/2).
  std::vector<std::uint64_t> visits;
  std::vector<std::uint64_t> late_visits;
  /// The policy the learner would play next, and its exact value.
  Policy final_policy;
  double final_policy_value = 0.0;

  double cumulative_regret() const {
    return episodes.empty() ? 0.0 : episodes.back().cumulative_regret;
  }
};

/// Runs T episodes of a variant. Regret uses exact values, never sampled
/// returns. Deterministic given the generator state.
RegretTrace run(const TabularMdp& mdp, Variant variant, const BonusSpec& spec,
                const std::optional<ShapingTable>& shaping, std::uint64_t episodes,
                CounterRng& rng);

/// Columns: episode,instant_regret,cumulative_regret,episodic_return,optimism_holds
void write_trace_csv(const RegretTrace& trace, std::ostream& out);

/// Shortest round-trip decimal form; used by every CSV/JSON writer.
std::string format_number(double x);

}  // namespace sucbvi
