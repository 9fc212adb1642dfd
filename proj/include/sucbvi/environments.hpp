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
#include <string_view>
#include <vector>

#include "sucbvi/mdp.hpp"

namespace sucbvi {

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

/// Maze actions. Chains use kLeft/kRight renumbered to 0/1.
enum MazeAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

struct MazeSpec {
  std::string name;
  int width = 0;
  int height = 0;
  std::vector<Cell> walls;
  Cell start;
  Cell goal;
  int horizon = 0;

  /// Parses a picture made of '.', '#', 'S' (start) and 'G' (goal).
  static MazeSpec from_ascii(std::string name, const std::vector<std::string>& rows,
                             int horizon);
  bool is_wall(Cell c) const;
};

/// A grid environment: the layered MDP plus the cell of every local state,
/// shared by all layers.
struct GridEnv {
  std::string name;
  TabularMdp mdp;
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;       // local state index -> cell
  std::vector<int> cell_state;   // row * width + col -> local index or -1
  Cell goal;

  StateIndex state_of(Cell c) const {
    return static_cast<StateIndex>(cell_state[c.row * width + c.col]);
  }
};

/// Deterministic 4-action maze. Bumping into a wall or the boundary keeps
/// the agent in place; the goal is absorbing and pays 1 for every action.
/// Throws kUnreachableGoal when the goal cannot be entered before step H.
GridEnv build_maze(const MazeSpec& spec);

/// 1 x L chain with actions {left, right}; endpoints clamp.
GridEnv build_chain(int length, int goal_index, int start_index, int horizon);

/// Built-in presets: grid8, corridor10, dcorridor10x20, chain11.
const std::vector<std::string>& preset_names();
MazeSpec preset_spec(std::string_view name);
GridEnv build_preset(std::string_view name);

/// Shortest path length (in moves) between two free cells, or -1.
int maze_distance(const MazeSpec& spec, Cell from, Cell to);

}  // namespace sucbvi
