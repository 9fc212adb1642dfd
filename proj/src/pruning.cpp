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

#include "sucbvi/pruning.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "sucbvi/error.hpp"

namespace sucbvi {

SurrogateQ surrogate_q(const TabularMdp& mdp, const ShapingTable& shaping, double beta) {
  const StateLayout& L = mdp.layout();
  if (!(shaping.layout() == L)) {
    fail(ErrorCode::kShapeMismatch, "shaping table does not match the MDP");
  }
  SurrogateQ out{ValueTable(ValueKind::kSurrogateUpper, L),
                 ValueTable(ValueKind::kSurrogateLower, L)};
  for (int h = 0; h < L.horizon(); ++h) {
    const std::size_t next = L.layer_offset(h + 1);
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      for (int a = 0; a < L.actions(); ++a) {
        const std::size_t p = L.pair(h, s, a);
        double ev = 0.0;
        for (const Transition& tr : mdp.successors(p)) {
          ev += tr.prob * shaping.at(next + tr.next);
        }
        out.upper.q[p] = mdp.reward(p) + beta * ev;
        out.lower.q[p] = mdp.reward(p) + ev;
      }
    }
  }
  return out;
}

IndexSet pseudosub(const ValueTable& vstar, const ValueTable& q_upper, double delta) {
  if (!(delta > 0.0)) fail(ErrorCode::kInvalidArgument, "delta must be positive");
  const StateLayout& L = vstar.layout;
  if (!(q_upper.layout == L)) {
    fail(ErrorCode::kShapeMismatch, "surrogate and optimal values differ in layout");
  }
  IndexSet out(L.pair_count());
  for (int h = 0; h < L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      const double v = vstar.value(h, s);
      for (int a = 0; a < L.actions(); ++a) {
        const std::size_t p = L.pair(h, s, a);
        if (v >= delta + q_upper.q[p]) out.insert(p);
      }
    }
  }
  return out;
}

IndexSet path_pseudosub(const TabularMdp& mdp, const IndexSet& pseudo) {
  const StateLayout& L = mdp.layout();
  const IndexSet all = reachable_states(mdp);
  IndexSet free_reach(L.state_count());
  free_reach.insert(L.global(0, mdp.start()));
  for (int h = 0; h < L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      if (!free_reach.contains(L.global(h, s))) continue;
      for (int a = 0; a < L.actions(); ++a) {
        const std::size_t p = L.pair(h, s, a);
        if (pseudo.contains(p)) continue;
        for (const Transition& tr : mdp.successors(p)) {
          free_reach.insert(L.global(h + 1, tr.next));
        }
      }
    }
  }
  IndexSet out(L.state_count());
  for (std::size_t g : all.members()) {
    if (!free_reach.contains(g)) out.insert(g);
  }
  return out;
}

IndexSet boundary_pseudosub(const StateLayout& layout, const IndexSet& pseudo,
                            const IndexSet& path) {
  IndexSet out(layout.pair_count());
  for (std::size_t p : pseudo.members()) {
    if (!path.contains(p / static_cast<std::size_t>(layout.actions()))) out.insert(p);
  }
  return out;
}

namespace {

double bound_score(const StateLayout& L, double beta, double vmax, std::size_t effective,
                   std::size_t boundary, double delta, const PruneOptions& options) {
  const double H = L.horizon();
  const double S = static_cast<double>(L.state_count());
  const double A = L.actions();
  const double T = static_cast<double>(std::max<std::uint64_t>(options.episodes, 1));
  const double vm = std::max(vmax, 1.0);
  const double log_term = std::log(vm * S * A * T / options.confidence);
  const double bdy = static_cast<double>(boundary);
  const double leading =
      H * beta * vm * std::sqrt(static_cast<double>(effective) * A * T * log_term);
  const double a_term = std::sqrt(S * A) / delta;
  const double b_term = beta * vm * std::sqrt(H * bdy) / (delta * delta);
  const double lower = beta * beta * vm * vm * std::sqrt(H * bdy) * log_term *
                       std::min(a_term, b_term);
  return leading + lower;
}

}  // namespace

std::vector<PruneReport> delta_sweep(const TabularMdp& mdp, const ShapingTable& shaping,
                                     std::span<const double> deltas,
                                     const PruneOptions& options) {
  for (double d : deltas) {
    if (!(d > 0.0)) fail(ErrorCode::kInvalidArgument, "delta must be positive");
  }
  const ValueTable vstar = exact_optimal_values(mdp);
  const SurrogateQ sq = surrogate_q(mdp, shaping, options.beta);
  const std::size_t reachable = reachable_states(mdp).size();
  std::vector<PruneReport> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    PruneReport r;
    r.delta = d;
    r.pseudosub = pseudosub(vstar, sq.upper, d);
    r.path_pseudosub = path_pseudosub(mdp, r.pseudosub);
    r.boundary = boundary_pseudosub(mdp.layout(), r.pseudosub, r.path_pseudosub);
    r.effective_states = mdp.layout().state_count() - r.path_pseudosub.size();
    r.reachable_states = reachable;
    r.bound_score = bound_score(mdp.layout(), options.beta, shaping.vmax(),
                                r.effective_states, r.boundary.size(), d, options);
    r.surrogate = sq;
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t best_delta(std::span<const PruneReport> reports) {
  if (reports.empty()) fail(ErrorCode::kInvalidArgument, "empty delta sweep");
  const auto better = [](const PruneReport& a, const PruneReport& b) {
    const bool a_prunes = !a.path_pseudosub.empty();
    const bool b_prunes = !b.path_pseudosub.empty();
    if (a_prunes != b_prunes) return a_prunes;
    if (a.bound_score != b.bound_score) return a.bound_score < b.bound_score;
    return a.delta < b.delta;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (better(reports[i], reports[best])) best = i;
  }
  return best;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
    fail(ErrorCode::kInvalidArgument, "geometric grid needs 0 < lo <= hi and n >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double ratio = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = lo * std::exp(ratio * i);
  out.back() = hi;
  return out;
}

std::string prune_report_to_json(const PruneReport& report, const TabularMdp& mdp,
                                 bool with_members) {
  const StateLayout& L = mdp.layout();
  nlohmann::ordered_json j;
  j["delta"] = report.delta;
  j["sizes"] = {{"pseudosub", report.pseudosub.size()},
                {"path", report.path_pseudosub.size()},
                {"boundary", report.boundary.size()},
                {"effective", report.effective_states},
                {"reachable", report.reachable_states}};
  j["bound_score"] = report.bound_score;
  if (with_members) {
    const auto pairs = [&](const IndexSet& set) {
      nlohmann::json arr = nlohmann::json::array();
      for (std::size_t p : set.members()) {
        const std::size_t g = p / L.actions();
        const int h = L.layer_of(g);
        const StateIndex s = static_cast<StateIndex>(g - L.layer_offset(h));
        arr.push_back({h, mdp.name(h, s), static_cast<int>(p % L.actions())});
      }
      return arr;
    };
    nlohmann::json states = nlohmann::json::array();
    for (std::size_t g : report.path_pseudosub.members()) {
      const int h = L.layer_of(g);
      states.push_back({h, mdp.name(h, static_cast<StateIndex>(g - L.layer_offset(h)))});
    }
    j["members"] = {{"pseudosub", pairs(report.pseudosub)},
                    {"path", std::move(states)},
                    {"boundary", pairs(report.boundary)}};
  }
  return j.dump(2);
}

}  // namespace sucbvi
