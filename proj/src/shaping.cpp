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

#include "sucbvi/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "sucbvi/error.hpp"

namespace sucbvi {

using nlohmann::json;

ShapingTable::ShapingTable(const StateLayout& layout, std::vector<double> values, double beta)
    : layout_(layout), values_(std::move(values)), beta_(beta) {
  if (values_.size() != layout_.state_count()) {
    fail(ErrorCode::kShapeMismatch, "shaping table size does not match the layout");
  }
  layer_max_.assign(static_cast<std::size_t>(layout_.horizon()) + 1, 0.0);
  for (int h = 0; h <= layout_.horizon(); ++h) {
    for (StateIndex s = 0; s < layout_.layer_size(h); ++s) {
      const double v = values_[layout_.global(h, s)];
      if (!std::isfinite(v) || v < 0.0) {
        fail(ErrorCode::kInvalidArgument, "shaping values must be finite and nonnegative");
      }
      layer_max_[h] = std::max(layer_max_[h], v);
    }
  }
  vmax_ = *std::max_element(layer_max_.begin(), layer_max_.end());
}

ShapingTable build_sandwiched(const ValueTable& vstar, double beta, CounterRng& rng) {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    fail(ErrorCode::kInvalidBeta, "beta must be >= 1, got " + std::to_string(beta));
  }
  std::vector<double> values(vstar.v.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double c = rng.uniform(1.0, beta);
    const double v = vstar.v[i];
    double vt = v / c;
    // Rounding can push either side of the sandwich by an ulp; nudge back.
    while (beta * vt < v) vt = std::nextafter(vt, std::numeric_limits<double>::infinity());
    while (vt > v) vt = std::nextafter(vt, 0.0);
    values[i] = vt;
  }
  return ShapingTable(vstar.layout, std::move(values), beta);
}

ShapingTable corrupt(const ShapingTable& table, double sigma, CounterRng& rng) {
  if (!(sigma >= 0.0)) fail(ErrorCode::kInvalidArgument, "sigma must be nonnegative");
  std::vector<double> values = table.values();
  if (sigma > 0.0) {
    for (double& v : values) v = std::max(0.0, v + sigma * rng.normal());
  }
  return ShapingTable(table.layout(), std::move(values), table.beta());
}

SandwichReport verify_sandwich(const ShapingTable& table, const ValueTable& vstar) {
  if (!(table.layout() == vstar.layout)) {
    fail(ErrorCode::kShapeMismatch, "shaping table and value table have different shapes");
  }
  SandwichReport report;
  const double beta = table.beta();
  for (std::size_t i = 0; i < vstar.v.size(); ++i) {
    const double v = vstar.v[i];
    const double vt = table.at(i);
    if (v > 0.0) {
      const double ratio = vt > 0.0 ? v / vt : std::numeric_limits<double>::infinity();
      report.worst_ratio = std::max(report.worst_ratio, ratio);
    }
    if (vt > v || beta * vt < v) {
      report.holds = false;
      report.violating_states.push_back(i);
    }
  }
  return report;
}

std::string shaping_to_json(const ShapingTable& table, const TabularMdp& mdp) {
  if (!(table.layout() == mdp.layout())) {
    fail(ErrorCode::kShapeMismatch, "shaping table does not belong to this MDP");
  }
  json values = json::object();
  for (int h = 0; h <= mdp.horizon(); ++h) {
    json layer = json::object();
    for (StateIndex s = 0; s < mdp.layer_size(h); ++s) layer[mdp.name(h, s)] = table.at(h, s);
    values[std::to_string(h)] = std::move(layer);
  }
  json doc;
  doc["beta"] = table.beta();
  doc["vmax"] = table.vmax();
  doc["values"] = std::move(values);
  return doc.dump();
}

ShapingTable shaping_from_json(const std::string& text, const TabularMdp& mdp) {
  try {
    const json doc = json::parse(text);
    const StateLayout& L = mdp.layout();
    std::vector<double> values(L.state_count(), 0.0);
    const json& layers = doc.at("values");
    for (int h = 0; h <= mdp.horizon(); ++h) {
      const json& layer = layers.at(std::to_string(h));
      if (layer.size() != mdp.layer_size(h)) {
        fail(ErrorCode::kShapeMismatch, "shaping layer " + std::to_string(h) +
                                            " has the wrong number of states");
      }
      for (StateIndex s = 0; s < mdp.layer_size(h); ++s) {
        values[L.global(h, s)] = layer.at(mdp.name(h, s)).get<double>();
      }
    }
    return ShapingTable(L, std::move(values), doc.at("beta").get<double>());
  } catch (const json::exception& e) {
    fail(ErrorCode::kShapeMismatch, std::string("malformed shaping document: ") + e.what());
  }
}

}  // namespace sucbvi
