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

#include "sucbvi/modelsel.hpp"

#include <algorithm>
#include <cmath>

#include "sucbvi/error.hpp"

namespace sucbvi {

BetaGrid BetaGrid::exponential(int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "beta grid needs at least one point");
  BetaGrid g;
  for (int i = 0; i < n; ++i) g.betas.push_back(std::ldexp(1.0, i));
  return g;
}

void BetaGrid::validate() const {
  if (betas.empty()) fail(ErrorCode::kInvalidBeta, "beta grid is empty");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 1.0) || !std::isfinite(betas[i])) {
      fail(ErrorCode::kInvalidBeta, "grid betas must be finite and >= 1");
    }
    if (i > 0 && !(betas[i] > betas[i - 1])) {
      fail(ErrorCode::kInvalidBeta, "grid betas must be strictly increasing");
    }
  }
}

MasterState::MasterState(std::size_t arms, std::optional<std::uint64_t> horizon)
    : p_(arms, arms ? 1.0 / static_cast<double>(arms) : 0.0),
      loss_(arms, 0.0),
      horizon_(horizon) {
  if (arms == 0) fail(ErrorCode::kInvalidArgument, "master needs at least one arm");
  if (horizon_ && *horizon_ == 0) horizon_.reset();
}

void MasterState::fix_eta(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    fail(ErrorCode::kInvalidArgument, "learning rate must be finite and nonnegative");
  }
  fixed_eta_ = eta;
  refresh();
}

double MasterState::eta() const noexcept {
  if (fixed_eta_) return *fixed_eta_;
  const double n = static_cast<double>(p_.size());
  const double denom = horizon_ ? static_cast<double>(*horizon_)
                                : static_cast<double>(std::max<std::uint64_t>(t_, 1));
  return std::sqrt(n * std::log(n) / denom);
}

double MasterState::gamma() const noexcept {
  if (t_ == 0) return 1.0;
  const double n = static_cast<double>(p_.size());
  return std::min(1.0, std::sqrt(n * std::log(n) / static_cast<double>(t_)));
}

std::size_t MasterState::select(CounterRng& rng) const {
  if (p_.size() == 1) return 0;
  return rng.categorical(p_);
}

void MasterState::feed(std::size_t arm, double normalized_return) {
  if (arm >= p_.size()) fail(ErrorCode::kInvalidArgument, "arm index out of range");
  if (!(normalized_return >= 0.0 && normalized_return <= 1.0)) {
    fail(ErrorCode::kOutOfRangeReturn, "normalized return must lie in [0, 1]");
  }
  loss_[arm] += (1.0 - normalized_return) / p_[arm];
  ++t_;
  refresh();
}

void MasterState::refresh() {
  const double n = static_cast<double>(p_.size());
  const double e = eta();
  const double g = gamma();
  // Shift by the smallest loss so the largest exponent is 0.
  const double lo = *std::min_element(loss_.begin(), loss_.end());
  double z = 0.0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    p_[i] = std::exp(-e * (loss_[i] - lo));
    z += p_[i];
  }
  for (double& x : p_) x = (1.0 - g) * x / z + g / n;
}

OnlineResult run_online(const TabularMdp& mdp, const BetaGrid& grid, const BonusSpec& spec,
                        const ShapingTable& shaping, std::uint64_t episodes, CounterRng& rng,
                        const OnlineOptions& options) {
  grid.validate();
  const StateLayout& L = mdp.layout();
  std::vector<ShapedUcbvi> arms;
  arms.reserve(grid.betas.size());
  for (double b : grid.betas) {
    BonusSpec s = spec;
    s.beta = b;
    arms.emplace_back(mdp, Variant::kShaped, s, shaping);
  }
  const std::size_t n = arms.size();
  MasterState master(n, options.known_horizon ? std::optional<std::uint64_t>(episodes)
                                              : std::nullopt);
  CounterRng env_rng = rng.split("trajectory");
  CounterRng pick_rng = rng.split("master");
  std::vector<Counts> counts(options.share_data ? 1 : n, Counts(L));
  std::vector<std::uint64_t> played(n, 0);

  OnlineResult out;
  RegretTrace& trace = out.trace;
  trace.optimal_value = exact_optimal_values(mdp).value(0, mdp.start());
  trace.visits.assign(L.state_count(), 0);
  trace.late_visits.assign(L.state_count(), 0);
  trace.episodes.reserve(episodes);
  std::vector<double> scratch;
  double cumulative = 0.0;
  const double H = static_cast<double>(L.horizon());
  for (std::uint64_t t = 1; t <= episodes; ++t) {
    const std::size_t arm = master.select(pick_rng);
    Counts& data = counts[options.share_data ? 0 : arm];
    const std::uint64_t arm_t = options.share_data ? t : played[arm] + 1;
    const PlanResult planned = arms[arm].plan_episode(data, arm_t);
    const double value = start_value(mdp, planned.policy, scratch);
    const Trajectory traj = sample_trajectory(mdp, planned.policy, env_rng);
    data.update(traj);
    ++played[arm];
    master.feed(arm, std::clamp(traj.episodic_return / H, 0.0, 1.0));

    const bool late = 2 * t > episodes;
    for (const Step& st : traj.steps) {
      const std::size_t g = L.global(st.h, st.state);
      ++trace.visits[g];
      if (late) ++trace.late_visits[g];
    }
    EpisodeRecord rec;
    rec.episode = t;
    rec.instant_regret = trace.optimal_value - value;
    cumulative += rec.instant_regret;
    rec.cumulative_regret = cumulative;
    rec.episodic_return = traj.episodic_return;
    rec.planned_value = planned.values.value(0, mdp.start());
    rec.optimism_holds = rec.planned_value >= trace.optimal_value;
    rec.arm = static_cast<int>(arm);
    trace.episodes.push_back(rec);
  }
  const std::vector<double>& p = master.p();
  const std::size_t lead =
      static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  const Counts& lead_data = counts[options.share_data ? 0 : lead];
  const std::uint64_t lead_t = options.share_data ? episodes + 1 : played[lead] + 1;
  trace.final_policy = arms[lead].plan_episode(lead_data, lead_t).policy;
  trace.final_policy_value = start_value(mdp, trace.final_policy, scratch);
  out.final_p = p;
  out.pulls = std::move(played);
  return out;
}

}  // namespace sucbvi
