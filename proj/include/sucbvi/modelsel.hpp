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
#include <optional>
#include <string>
#include <vector>

#include "sucbvi/learner.hpp"

namespace sucbvi {

struct BetaGrid {
  std::vector<double> betas;

  /// beta_i = 2^(i-1), i = 1..n.
  static BetaGrid exponential(int n);
  /// Throws kInvalidBeta unless nonempty, strictly increasing and >= 1.
  void validate() const;
};

/// Anytime EXP3 over N arms with losses in [0, 1].
///   p = (1 - gamma) softmax(-eta Lhat) + gamma / N
/// where Lhat accumulates importance-weighted losses, eta = sqrt(N ln N / T)
/// for a known horizon T (else sqrt(N ln N / t)) and
/// gamma = min(1, sqrt(N ln N / t)).
class MasterState {
 public:
  explicit MasterState(std::size_t arms, std::optional<std::uint64_t> horizon = std::nullopt);

  /// Pins the learning rate instead of the schedule above.
  void fix_eta(double eta);

  std::size_t arms() const noexcept { return p_.size(); }
  const std::vector<double>& p() const noexcept { return p_; }
  const std::vector<double>& importance_losses() const noexcept { return loss_; }
  std::uint64_t updates() const noexcept { return t_; }
  double eta() const noexcept;
  double gamma() const noexcept;

  std::size_t select(CounterRng& rng) const;
  /// Throws kOutOfRangeReturn unless normalized_return is in [0, 1].
  void feed(std::size_t arm, double normalized_return);

 private:
  void refresh();

  std::vector<double> p_;
  std::vector<double> loss_;
  std::optional<std::uint64_t> horizon_;
  std::optional<double> fixed_eta_;
  std::uint64_t t_ = 0;
};

struct OnlineOptions {
  /// All arms plan from one pool of counts (true) or only from the episodes
  /// they played themselves.
  bool share_data = true;
  /// Use T in the learning rate.
  bool known_horizon = true;
};

struct OnlineResult {
  RegretTrace trace;  // EpisodeRecord::arm holds the selected arm
  std::vector<double> final_p;
  std::vector<std::uint64_t> pulls;
};

/// Runs UCBVI-Shaped with beta chosen online from the grid, one episode per
/// selection. Every arm projects with its own beta against the same V~.
/// With one arm the trace equals run(mdp, Shaped, ...) for the same rng.
OnlineResult run_online(const TabularMdp& mdp, const BetaGrid& grid, const BonusSpec& spec,
                        const ShapingTable& shaping, std::uint64_t episodes, CounterRng& rng,
                        const OnlineOptions& options = {});

}  // namespace sucbvi
