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

#include <span>
#include <string>
#include <vector>

#include "sucbvi/mdp.hpp"
#include "sucbvi/shaping.hpp"

namespace sucbvi {

/// Q~u = r + E_P[beta V~_{h+1}] and Q~l = r + E_P[V~_{h+1}] under the true
/// model. Only q is filled; v stays zero.
struct SurrogateQ {
  ValueTable upper;
  ValueTable lower;
};

SurrogateQ surrogate_q(const TabularMdp& mdp, const ShapingTable& shaping, double beta);

/// Pairs with V*_h(s) >= delta + Q~u_h(s, a), indexed by pair id.
IndexSet pseudosub(const ValueTable& vstar, const ValueTable& q_upper, double delta);

/// Global ids of states reachable from the start, but only through some
/// pseudo-suboptimal pair. A pair at the destination itself does not count.
IndexSet path_pseudosub(const TabularMdp& mdp, const IndexSet& pseudo);

/// Pseudo-suboptimal pairs whose state is not path-pseudo-suboptimal.
IndexSet boundary_pseudosub(const StateLayout& layout, const IndexSet& pseudo,
                            const IndexSet& path);

struct PruneReport {
  double delta = 0.0;
  IndexSet pseudosub;       // pair ids
  IndexSet path_pseudosub;  // global state ids
  IndexSet boundary;        // pair ids
  std::size_t effective_states = 0;
  std::size_t reachable_states = 0;
  /// Leading terms of the regret bound at this delta, constants dropped:
  ///   H b Vmax sqrt(|S_eff| A T L)
  ///     + b^2 Vmax^2 sqrt(H |Bdy|) L min(sqrt(S A) / d, b Vmax sqrt(H |Bdy|) / d^2)
  /// with L = ln(Vmax S A T / delta_conf). Used only to rank deltas.
  double bound_score = 0.0;
  SurrogateQ surrogate;
};

struct PruneOptions {
  double beta = 1.0;
  std::uint64_t episodes = 5000;  // T inside bound_score
  double confidence = 0.05;       // delta inside the log
};

/// One report per delta, in the given order. Throws kInvalidArgument on a
/// nonpositive delta and kShapeMismatch if the table does not fit.
std::vector<PruneReport> delta_sweep(const TabularMdp& mdp, const ShapingTable& shaping,
                                     std::span<const double> deltas,
                                     const PruneOptions& options);

/// Index of the smallest bound_score among deltas that prune at least one
/// state, or over all deltas if none does; ties go to the smaller delta.
/// Throws kInvalidArgument on an empty sweep.
std::size_t best_delta(std::span<const PruneReport> reports);

/// n points geometrically spaced from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int n);

/// {"delta", "sizes": {"pseudosub", "path", "boundary", "effective",
/// "reachable"}, "bound_score", "members": {...}} with members as
/// [h, state, action] / [h, state] name triples when requested.
std::string prune_report_to_json(const PruneReport& report, const TabularMdp& mdp,
                                 bool with_members);

}  // namespace sucbvi
