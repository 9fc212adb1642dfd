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

#include "sucbvi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "sucbvi/error.hpp"

namespace sucbvi {

using nlohmann::json;

StateLayout::StateLayout(int horizon, int actions,
                         std::span<const std::size_t> layer_sizes)
    : horizon_(horizon), actions_(actions) {
  if (horizon <= 0) fail(ErrorCode::kInvalidMdp, "horizon must be positive");
  if (actions <= 0) fail(ErrorCode::kInvalidMdp, "action count must be positive");
  if (layer_sizes.size() != static_cast<std::size_t>(horizon) + 1) {
    fail(ErrorCode::kInvalidMdp, "expected H+1 layers, got " +
                                     std::to_string(layer_sizes.size()));
  }
  offsets_.assign(1, 0);
  for (std::size_t n : layer_sizes) offsets_.push_back(offsets_.back() + n);
}

int StateLayout::layer_of(std::size_t global_id) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global_id);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

std::vector<std::size_t> IndexSet::members() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  if (other.universe() != universe()) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

std::optional<StateIndex> TabularMdp::find(int h, const std::string& name) const {
  for (StateIndex s = 0; s < layer_size(h); ++s) {
    if (names_[layout_.global(h, s)] == name) return s;
  }
  return std::nullopt;
}

MdpBuilder::MdpBuilder(int horizon, int actions,
                       std::vector<std::vector<std::string>> layers)
    : horizon_(horizon), actions_(actions), layers_(std::move(layers)) {
  if (actions > 255) fail(ErrorCode::kInvalidMdp, "at most 255 actions supported");
  std::vector<std::size_t> sizes;
  for (const auto& layer : layers_) sizes.push_back(layer.size());
  layout_ = StateLayout(horizon, actions, sizes);
  for (int h = 0; h < horizon; ++h) {
    if (layers_[h].empty()) {
      fail(ErrorCode::kInvalidMdp, "layer " + std::to_string(h) + " is empty");
    }
  }
  rows_.resize(layout_.pair_count());
}

MdpBuilder& MdpBuilder::set_start(StateIndex s) {
  if (s >= layers_[0].size()) fail(ErrorCode::kInvalidMdp, "start state out of range");
  start_ = s;
  return *this;
}

MdpBuilder& MdpBuilder::set(int h, StateIndex s, int a, double reward,
                            std::vector<Transition> successors) {
  if (h < 0 || h >= horizon_ || s >= layers_[h].size() || a < 0 || a >= actions_) {
    fail(ErrorCode::kInvalidMdp, "transition index out of range");
  }
  std::sort(successors.begin(), successors.end(),
            [](const Transition& x, const Transition& y) { return x.next < y.next; });
  std::vector<Transition> merged;
  for (const Transition& t : successors) {
    if (!merged.empty() && merged.back().next == t.next) {
      merged.back().prob += t.prob;
    } else {
      merged.push_back(t);
    }
  }
  rows_[layout_.pair(h, s, a)] = std::make_pair(reward, std::move(merged));
  return *this;
}

TabularMdp MdpBuilder::build() const {
  TabularMdp mdp;
  mdp.layout_ = layout_;
  mdp.start_ = start_;
  for (const auto& layer : layers_) {
    mdp.names_.insert(mdp.names_.end(), layer.begin(), layer.end());
  }
  mdp.rewards_.resize(layout_.pair_count());
  mdp.row_begin_.assign(layout_.pair_count() + 1, 0);
  for (int h = 0; h < horizon_; ++h) {
    for (StateIndex s = 0; s < layers_[h].size(); ++s) {
      for (int a = 0; a < actions_; ++a) {
        const std::size_t p = layout_.pair(h, s, a);
        const auto where = [&] {
          return " at (h=" + std::to_string(h) + ", s=" + layers_[h][s] +
                 ", a=" + std::to_string(a) + ")";
        };
        if (!rows_[p]) fail(ErrorCode::kInvalidMdp, "missing transition row" + where());
        const auto& [reward, succ] = *rows_[p];
        if (!(reward >= 0.0 && reward <= 1.0)) {
          fail(ErrorCode::kInvalidMdp, "reward outside [0,1]" + where());
        }
        double total = 0.0;
        for (const Transition& t : succ) {
          if (t.next >= layers_[h + 1].size()) {
            fail(ErrorCode::kInvalidMdp, "successor outside layer h+1" + where());
          }
          if (!(t.prob >= 0.0) || !std::isfinite(t.prob)) {
            fail(ErrorCode::kInvalidMdp, "negative probability" + where());
          }
          total += t.prob;
        }
        if (std::abs(total - 1.0) > 1e-12) {
          fail(ErrorCode::kInvalidMdp, "transition row does not sum to 1" + where());
        }
        mdp.rewards_[p] = reward;
        for (const Transition& t : succ) {
          if (t.prob > 0.0) mdp.transitions_.push_back(t);
        }
        mdp.row_begin_[p + 1] = mdp.transitions_.size();
      }
    }
  }
  return mdp;
}

const char* value_kind_name(ValueKind kind) noexcept {
  switch (kind) {
    case ValueKind::kOptimal: return "optimal";
    case ValueKind::kEmpirical: return "empirical";
    case ValueKind::kShaping: return "shaping";
    case ValueKind::kSurrogateUpper: return "surrogate_upper";
    case ValueKind::kSurrogateLower: return "surrogate_lower";
    case ValueKind::kPolicy: return "policy";
  }
  return "unknown";
}

namespace {

double expect(std::span<const Transition> row, const double* next_values) {
  double acc = 0.0;
  for (const Transition& t : row) acc += t.prob * next_values[t.next];
  return acc;
}

}  // namespace

ValueTable exact_optimal_values(const TabularMdp& mdp) {
  const StateLayout& L = mdp.layout();
  ValueTable out(ValueKind::kOptimal, L);
  for (int h = L.horizon() - 1; h >= 0; --h) {
    const double* next = out.v.data() + L.layer_offset(h + 1);
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < L.actions(); ++a) {
        const std::size_t p = L.pair(h, s, a);
        out.q[p] = mdp.reward(p) + expect(mdp.successors(p), next);
        best = std::max(best, out.q[p]);
      }
      out.v[L.global(h, s)] = best;
    }
  }
  return out;
}

ValueTable policy_value(const TabularMdp& mdp, const Policy& pi) {
  const StateLayout& L = mdp.layout();
  if (!(pi.layout() == L)) fail(ErrorCode::kShapeMismatch, "policy layout differs from MDP");
  ValueTable out(ValueKind::kPolicy, L);
  for (int h = L.horizon() - 1; h >= 0; --h) {
    const double* next = out.v.data() + L.layer_offset(h + 1);
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      for (int a = 0; a < L.actions(); ++a) {
        const std::size_t p = L.pair(h, s, a);
        out.q[p] = mdp.reward(p) + expect(mdp.successors(p), next);
      }
      out.v[L.global(h, s)] = out.q[L.pair(h, s, pi.action(h, s))];
    }
  }
  return out;
}

double start_value(const TabularMdp& mdp, const Policy& pi, std::vector<double>& scratch) {
  const StateLayout& L = mdp.layout();
  scratch.assign(L.state_count(), 0.0);
  for (int h = L.horizon() - 1; h >= 0; --h) {
    const double* next = scratch.data() + L.layer_offset(h + 1);
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      const std::size_t p = L.pair(h, s, pi.action(h, s));
      scratch[L.global(h, s)] = mdp.reward(p) + expect(mdp.successors(p), next);
    }
  }
  return scratch[L.global(0, mdp.start())];
}

Policy greedy_policy(const ValueTable& values) {
  const StateLayout& L = values.layout;
  Policy pi(L);
  for (int h = 0; h < L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      int best = 0;
      for (int a = 1; a < L.actions(); ++a) {
        if (values.q[L.pair(h, s, a)] > values.q[L.pair(h, s, best)]) best = a;
      }
      pi.set(h, s, best);
    }
  }
  return pi;
}

Trajectory sample_trajectory(const TabularMdp& mdp, const Policy& pi, CounterRng& rng) {
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(mdp.horizon()));
  StateIndex s = mdp.start();
  std::vector<double> weights;
  for (int h = 0; h < mdp.horizon(); ++h) {
    const int a = pi.action(h, s);
    const auto row = mdp.successors(h, s, a);
    StateIndex next = row.front().next;
    if (row.size() > 1) {
      weights.clear();
      for (const Transition& t : row) weights.push_back(t.prob);
      next = row[rng.categorical(weights)].next;
    }
    const double r = mdp.reward(h, s, a);
    traj.steps.push_back({h, s, a, r, next});
    traj.episodic_return += r;
    s = next;
  }
  return traj;
}

IndexSet occupancy_support(const TabularMdp& mdp, const Policy& pi) {
  const StateLayout& L = mdp.layout();
  IndexSet support(L.pair_count());
  std::vector<double> reach(L.state_count(), 0.0);
  reach[L.global(0, mdp.start())] = 1.0;
  for (int h = 0; h < L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      const double mass = reach[L.global(h, s)];
      if (mass <= 0.0) continue;
      const int a = pi.action(h, s);
      support.insert(L.pair(h, s, a));
      for (const Transition& t : mdp.successors(h, s, a)) {
        reach[L.global(h + 1, t.next)] += mass * t.prob;
      }
    }
  }
  return support;
}

IndexSet reachable_states(const TabularMdp& mdp) {
  const StateLayout& L = mdp.layout();
  IndexSet reach(L.state_count());
  reach.insert(L.global(0, mdp.start()));
  for (int h = 0; h < L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) {
      if (!reach.contains(L.global(h, s))) continue;
      for (int a = 0; a < L.actions(); ++a) {
        for (const Transition& t : mdp.successors(h, s, a)) {
          reach.insert(L.global(h + 1, t.next));
        }
      }
    }
  }
  return reach;
}

std::string mdp_to_json(const TabularMdp& mdp) {
  const int H = mdp.horizon();
  json doc;
  doc["H"] = H;
  doc["A"] = mdp.actions();
  json layers = json::array();
  for (int h = 0; h <= H; ++h) {
    json layer = json::array();
    for (StateIndex s = 0; s < mdp.layer_size(h); ++s) layer.push_back(mdp.name(h, s));
    layers.push_back(std::move(layer));
  }
  doc["layers"] = std::move(layers);
  doc["start"] = mdp.name(0, mdp.start());
  json transitions = json::object();
  json rewards = json::object();
  for (int h = 0; h < H; ++h) {
    json t_layer = json::object();
    json r_layer = json::object();
    for (StateIndex s = 0; s < mdp.layer_size(h); ++s) {
      json t_actions = json::array();
      json r_actions = json::array();
      for (int a = 0; a < mdp.actions(); ++a) {
        json row = json::object();
        for (const Transition& t : mdp.successors(h, s, a)) {
          row[mdp.name(h + 1, t.next)] = t.prob;
        }
        t_actions.push_back(std::move(row));
        r_actions.push_back(mdp.reward(h, s, a));
      }
      t_layer[mdp.name(h, s)] = std::move(t_actions);
      r_layer[mdp.name(h, s)] = std::move(r_actions);
    }
    transitions[std::to_string(h)] = std::move(t_layer);
    rewards[std::to_string(h)] = std::move(r_layer);
  }
  doc["transitions"] = std::move(transitions);
  doc["rewards"] = std::move(rewards);
  return doc.dump();
}

TabularMdp mdp_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidMdp, std::string("MDP JSON parse error: ") + e.what());
  }
  try {
    const int H = doc.at("H").get<int>();
    const int A = doc.at("A").get<int>();
    auto layers = doc.at("layers").get<std::vector<std::vector<std::string>>>();
    MdpBuilder builder(H, A, layers);
    auto index_in = [&](int h, const std::string& name) -> StateIndex {
      const auto& layer = layers[h];
      auto it = std::find(layer.begin(), layer.end(), name);
      if (it == layer.end()) {
        fail(ErrorCode::kInvalidMdp,
             "unknown state '" + name + "' in layer " + std::to_string(h));
      }
      return static_cast<StateIndex>(it - layer.begin());
    };
    builder.set_start(index_in(0, doc.at("start").get<std::string>()));
    const json& transitions = doc.at("transitions");
    const json& rewards = doc.at("rewards");
    for (int h = 0; h < H; ++h) {
      const std::string key = std::to_string(h);
      for (StateIndex s = 0; s < layers[h].size(); ++s) {
        const json& t_actions = transitions.at(key).at(layers[h][s]);
        const json& r_actions = rewards.at(key).at(layers[h][s]);
        if (t_actions.size() != static_cast<std::size_t>(A) ||
            r_actions.size() != static_cast<std::size_t>(A)) {
          fail(ErrorCode::kInvalidMdp, "state '" + layers[h][s] +
                                           "' must list exactly A actions");
        }
        for (int a = 0; a < A; ++a) {
          std::vector<Transition> succ;
          for (const auto& [next, p] : t_actions[a].items()) {
            succ.push_back({index_in(h + 1, next), p.get<double>()});
          }
          builder.set(h, s, a, r_actions[a].get<double>(), std::move(succ));
        }
      }
    }
    return builder.build();
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidMdp, std::string("malformed MDP document: ") + e.what());
  }
}

}  // namespace sucbvi
