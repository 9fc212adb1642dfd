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

#include "sucbvi/learner.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "sucbvi/error.hpp"

namespace sucbvi {

Counts::Counts(const StateLayout& layout)
    : layout_(layout), n_sa_(layout.pair_count(), 0), n_sas_(layout.pair_count()) {}

void Counts::update(const Trajectory& traj) {
  if (traj.steps.size() != static_cast<std::size_t>(layout_.horizon())) {
    fail(ErrorCode::kLayerMismatch, "trajectory length differs from the horizon");
  }
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const Step& st = traj.steps[i];
    if (st.h != static_cast<int>(i) || st.state >= layout_.layer_size(st.h) ||
        st.next_state >= layout_.layer_size(st.h + 1) || st.action < 0 ||
        st.action >= layout_.actions()) {
      fail(ErrorCode::kLayerMismatch, "trajectory step " + std::to_string(i) +
                                          " does not fit the layered state space");
    }
    if (i + 1 < traj.steps.size() && traj.steps[i + 1].state != st.next_state) {
      fail(ErrorCode::kLayerMismatch, "trajectory is not contiguous at step " +
                                          std::to_string(i));
    }
  }
  for (const Step& st : traj.steps) {
    const std::size_t p = layout_.pair(st.h, st.state, st.action);
    ++n_sa_[p];
    auto& row = n_sas_[p];
    auto it = std::lower_bound(row.begin(), row.end(), st.next_state,
                               [](const SuccessorCount& sc, StateIndex n) { return sc.next < n; });
    if (it != row.end() && it->next == st.next_state) {
      ++it->count;
    } else {
      row.insert(it, {st.next_state, 1});
    }
    ++total_;
  }
}

std::uint32_t Counts::visits(int h, StateIndex s, int a, StateIndex next) const {
  for (const SuccessorCount& sc : n_sas_[layout_.pair(h, s, a)]) {
    if (sc.next == next) return sc.count;
  }
  return 0;
}

std::optional<std::vector<Transition>> EmpiricalModel::row(int h, StateIndex s, int a) const {
  const std::size_t p = counts_->layout().pair(h, s, a);
  const std::uint32_t n = counts_->visits(p);
  if (n == 0) return std::nullopt;
  std::vector<Transition> out;
  for (const SuccessorCount& sc : counts_->successors(p)) {
    out.push_back({sc.next, static_cast<double>(sc.count) / static_cast<double>(n)});
  }
  return out;
}

void BonusSpec::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "bonus delta must lie in (0, 1)");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) {
    fail(ErrorCode::kInvalidArgument, "bonus scale c must be nonnegative");
  }
  if (!(beta >= 1.0)) fail(ErrorCode::kInvalidBeta, "bonus beta must be >= 1");
}

const char* bonus_kind_name(BonusKind kind) noexcept {
  switch (kind) {
    case BonusKind::kTheoreticalShaped: return "theoretical_shaped";
    case BonusKind::kTheoreticalVanilla: return "theoretical_vanilla";
    case BonusKind::kPracticalShaped: return "practical_shaped";
    case BonusKind::kPracticalVanilla: return "practical_vanilla";
    case BonusKind::kAdditiveShaping: return "additive_shaping";
    case BonusKind::kNone: return "none";
  }
  return "unknown";
}

BonusKind parse_bonus_kind(std::string_view name) {
  for (BonusKind k : {BonusKind::kTheoreticalShaped, BonusKind::kTheoreticalVanilla,
                      BonusKind::kPracticalShaped, BonusKind::kPracticalVanilla,
                      BonusKind::kAdditiveShaping, BonusKind::kNone}) {
    if (name == bonus_kind_name(k)) return k;
  }
  if (name == "theoretical") return BonusKind::kTheoreticalVanilla;
  if (name == "practical") return BonusKind::kPracticalVanilla;
  fail(ErrorCode::kConfig, "unknown bonus kind '" + std::string(name) + "'");
}

bool is_shaped(BonusKind kind) noexcept {
  return kind == BonusKind::kTheoreticalShaped || kind == BonusKind::kPracticalShaped ||
         kind == BonusKind::kAdditiveShaping;
}

double bonus(const BonusSpec& spec, const EmpiricalModel& model, const ShapingTable* shaping,
             int h, StateIndex s, int a, std::uint64_t t) {
  if (is_shaped(spec.kind) && shaping == nullptr) {
    fail(ErrorCode::kMissingShaping,
         std::string(bonus_kind_name(spec.kind)) + " bonus needs a shaping table");
  }
  const StateLayout& L = model.counts().layout();
  const std::size_t p = L.pair(h, s, a);
  const double n = static_cast<double>(model.counts().visits(p));
  const double H = static_cast<double>(L.horizon());
  const double S = static_cast<double>(L.state_count());
  const double A = static_cast<double>(L.actions());
  const double tt = static_cast<double>(std::max<std::uint64_t>(t, 1));

  switch (spec.kind) {
    case BonusKind::kNone:
      return 0.0;
    case BonusKind::kAdditiveShaping:
      return spec.c * shaping->at(h, s);
    case BonusKind::kPracticalVanilla:
      return n == 0.0 ? 2.0 * H : std::min(spec.c / std::sqrt(n), 2.0 * H);
    case BonusKind::kTheoreticalVanilla:
      return n == 0.0 ? 2.0 * H
                      : std::min(2.0 * H * std::sqrt(std::log(S * A * H * tt / spec.delta) / n),
                                 2.0 * H);
    case BonusKind::kPracticalShaped:
    case BonusKind::kTheoreticalShaped: {
      const double cap = 2.0 * spec.beta * shaping->vmax();
      if (n == 0.0) return cap;
      const std::size_t next_offset = L.layer_offset(h + 1);
      if (spec.kind == BonusKind::kPracticalShaped) {
        const double mean =
            model.expect(p, [&](StateIndex sp) { return shaping->at(next_offset + sp); });
        return std::min(spec.c * mean / std::sqrt(n), cap);
      }
      const double second_moment = model.expect(p, [&](StateIndex sp) {
        const double v = shaping->at(next_offset + sp);
        return v * v;
      });
      const double log1 = std::log(2.0 * S * A / spec.delta);
      const double log2 = std::log(2.0 * S * A * tt / spec.delta);
      const double b = 16.0 * spec.beta * std::sqrt(second_moment * log1 / n) +
                       12.0 * spec.beta * shaping->vmax() * log2 / n;
      return std::min(b, cap);
    }
  }
  return 0.0;
}

PlanResult plan(const TabularMdp& mdp, const EmpiricalModel& model,
                std::span<const double> bonuses, const PlanOptions& options) {
  const StateLayout& L = mdp.layout();
  if (bonuses.size() != L.pair_count()) {
    fail(ErrorCode::kShapeMismatch, "bonus vector does not cover every pair");
  }
  if (options.projection != nullptr && !(options.projection->layout() == L)) {
    fail(ErrorCode::kShapeMismatch, "projection table does not match the MDP");
  }
  PlanResult out{ValueTable(ValueKind::kEmpirical, L), Policy(L)};
  const double H = static_cast<double>(L.horizon());
  for (int h = L.horizon() - 1; h >= 0; --h) {
    const double* next = out.values.v.data() + L.layer_offset(h + 1);
    double next_max = 0.0;
    if (options.optimistic_unvisited) {
      const std::size_t n_next = L.layer_size(h + 1);
      for (std::size_t i = 0; i < n_next; ++i) next_max = std::max(next_max, next[i]);
    }
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      int best_a = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < L.actions(); ++a) {
        const std::size_t p = L.pair(h, s, a);
        const double continuation =
            model.visited(p) ? model.expect(p, [&](StateIndex sp) { return next[sp]; })
                             : next_max;
        const double q = std::min(mdp.reward(p) + bonuses[p] + continuation, H);
        out.values.q[p] = q;
        if (q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      double v = best_q;
      if (options.projection != nullptr) {
        v = std::min(v, options.projection_beta * options.projection->at(h, s));
      }
      out.values.v[L.global(h, s)] = v;
      out.policy.set(h, s, best_a);
    }
  }
  return out;
}

const char* variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::kUcbvi: return "UCBVI";
    case Variant::kShaped: return "Shaped";
    case Variant::kShapedBs: return "Shaped-BS";
    case Variant::kShapedP: return "Shaped-P";
    case Variant::kAdditive: return "Additive";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kUcbvi, Variant::kShaped, Variant::kShapedBs, Variant::kShapedP,
                    Variant::kAdditive}) {
    if (name == variant_name(v)) return v;
  }
  fail(ErrorCode::kConfig, "unknown variant '" + std::string(name) + "'");
}

bool uses_projection(Variant variant) noexcept {
  return variant == Variant::kShaped || variant == Variant::kShapedP;
}

bool needs_shaping(Variant variant) noexcept { return variant != Variant::kUcbvi; }

BonusSpec bonus_for_variant(Variant variant, BonusSpec spec) {
  const bool theoretical = spec.kind == BonusKind::kTheoreticalShaped ||
                           spec.kind == BonusKind::kTheoreticalVanilla;
  if (spec.kind == BonusKind::kNone) return spec;
  switch (variant) {
    case Variant::kUcbvi:
    case Variant::kShapedP:
      spec.kind = theoretical ? BonusKind::kTheoreticalVanilla : BonusKind::kPracticalVanilla;
      break;
    case Variant::kShaped:
    case Variant::kShapedBs:
      spec.kind = theoretical ? BonusKind::kTheoreticalShaped : BonusKind::kPracticalShaped;
      break;
    case Variant::kAdditive:
      spec.kind = BonusKind::kAdditiveShaping;
      break;
  }
  return spec;
}

ShapedUcbvi::ShapedUcbvi(const TabularMdp& mdp, Variant variant, BonusSpec spec,
                         std::optional<ShapingTable> shaping)
    : mdp_(&mdp),
      variant_(variant),
      spec_(bonus_for_variant(variant, spec)),
      shaping_(std::move(shaping)) {
  spec_.validate();
  if (needs_shaping(variant) && !shaping_) {
    fail(ErrorCode::kMissingShaping,
         std::string(variant_name(variant)) + " requires a shaping table");
  }
  if (shaping_ && !(shaping_->layout() == mdp.layout())) {
    fail(ErrorCode::kShapeMismatch, "shaping table does not match the MDP");
  }
}

PlanResult ShapedUcbvi::plan_episode(const Counts& counts, std::uint64_t t) const {
  const StateLayout& L = mdp_->layout();
  const EmpiricalModel model(counts);
  std::vector<double> bonuses(L.pair_count());
  for (int h = 0; h < L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      for (int a = 0; a < L.actions(); ++a) {
        bonuses[L.pair(h, s, a)] = bonus(spec_, model, shaping(), h, s, a, t);
      }
    }
  }
  PlanOptions options;
  if (uses_projection(variant_)) {
    options.projection = shaping();
    options.projection_beta = spec_.beta;
  }
  options.optimistic_unvisited = variant_ != Variant::kAdditive;
  return plan(*mdp_, model, bonuses, options);
}

RegretTrace run(const TabularMdp& mdp, Variant variant, const BonusSpec& spec,
                const std::optional<ShapingTable>& shaping, std::uint64_t episodes,
                CounterRng& rng) {
  const ShapedUcbvi learner(mdp, variant, spec, shaping);
  const StateLayout& L = mdp.layout();
  CounterRng env_rng = rng.split("trajectory");
  Counts counts(L);

  RegretTrace trace;
  trace.optimal_value = exact_optimal_values(mdp).value(0, mdp.start());
  trace.visits.assign(L.state_count(), 0);
  trace.late_visits.assign(L.state_count(), 0);
  trace.episodes.reserve(episodes);
  std::vector<double> scratch;
  double cumulative = 0.0;
  for (std::uint64_t t = 1; t <= episodes; ++t) {
    const PlanResult planned = learner.plan_episode(counts, t);
    const double played = start_value(mdp, planned.policy, scratch);
    const Trajectory traj = sample_trajectory(mdp, planned.policy, env_rng);
    counts.update(traj);
    const bool late = 2 * t > episodes;
    for (const Step& st : traj.steps) {
      const std::size_t g = L.global(st.h, st.state);
      ++trace.visits[g];
      if (late) ++trace.late_visits[g];
    }
    EpisodeRecord rec;
    rec.episode = t;
    rec.instant_regret = trace.optimal_value - played;
    cumulative += rec.instant_regret;
    rec.cumulative_regret = cumulative;
    rec.episodic_return = traj.episodic_return;
    rec.planned_value = planned.values.value(0, mdp.start());
    rec.optimism_holds = rec.planned_value >= trace.optimal_value;
    trace.episodes.push_back(rec);
  }
  const PlanResult final_plan = learner.plan_episode(counts, episodes + 1);
  trace.final_policy = final_plan.policy;
  trace.final_policy_value = start_value(mdp, trace.final_policy, scratch);
  return trace;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

void write_trace_csv(const RegretTrace& trace, std::ostream& out) {
  out << "episode,instant_regret,cumulative_regret,episodic_return,optimism_holds\n";
  for (const EpisodeRecord& r : trace.episodes) {
    out << r.episode << ',' << format_number(r.instant_regret) << ','
        << format_number(r.cumulative_regret) << ',' << format_number(r.episodic_return)
        << ',' << (r.optimism_holds ? 1 : 0) << '\n';
  }
}

}  // namespace sucbvi
