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

#include "sucbvi/environments.hpp"

#include <algorithm>
#include <deque>

#include "sucbvi/error.hpp"

namespace sucbvi {
namespace {

// Winding corridor from the bottom-right start to the top-left goal, with
// dead-end side branches. The shortest path is 18 moves.
const std::vector<std::string> kCorridor10 = {
    "G...#....#",
    "##..#.##.#",
    "...##..#.#",
    ".#..##.#.#",
    ".##..#...#",
    "...#...###",
    ".#.###...#",
    ".#...#.#.#",
    "...#.#.#..",
    "##.....#.S",
};

// The corridor above on the left and its mirror image (no goal) on the
// right; the halves touch only next to the start.
std::vector<std::string> double_corridor_rows() {
  std::vector<std::string> rows;
  for (const std::string& left : kCorridor10) {
    std::string right(left.rbegin(), left.rend());
    std::replace(right.begin(), right.end(), 'S', '.');
    std::replace(right.begin(), right.end(), 'G', '.');
    rows.push_back(left + right);
  }
  return rows;
}

std::vector<std::string> open_grid_rows(int size) {
  std::vector<std::string> rows(static_cast<std::size_t>(size), std::string(size, '.'));
  rows.front().front() = 'G';
  rows.back().back() = 'S';
  return rows;
}

std::string cell_name(Cell c) {
  return "r" + std::to_string(c.row) + "c" + std::to_string(c.col);
}

}  // namespace

MazeSpec MazeSpec::from_ascii(std::string name, const std::vector<std::string>& rows,
                              int horizon) {
  MazeSpec spec;
  spec.name = std::move(name);
  spec.height = static_cast<int>(rows.size());
  spec.width = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  spec.horizon = horizon;
  bool has_start = false;
  bool has_goal = false;
  for (int r = 0; r < spec.height; ++r) {
    if (static_cast<int>(rows[r].size()) != spec.width) {
      fail(ErrorCode::kInvalidArgument, "maze rows must have equal width");
    }
    for (int c = 0; c < spec.width; ++c) {
      switch (rows[r][c]) {
        case '#': spec.walls.push_back({r, c}); break;
        case 'S': spec.start = {r, c}; has_start = true; break;
        case 'G': spec.goal = {r, c}; has_goal = true; break;
        case '.': break;
        default:
          fail(ErrorCode::kInvalidArgument,
               std::string("unexpected maze character '") + rows[r][c] + "'");
      }
    }
  }
  if (!has_start || !has_goal) {
    fail(ErrorCode::kInvalidArgument, "maze needs exactly one S and one G");
  }
  return spec;
}

bool MazeSpec::is_wall(Cell c) const {
  return std::find(walls.begin(), walls.end(), c) != walls.end();
}

int maze_distance(const MazeSpec& spec, Cell from, Cell to) {
  const int W = spec.width;
  std::vector<int> dist(static_cast<std::size_t>(W * spec.height), -1);
  std::vector<char> blocked(dist.size(), 0);
  for (Cell w : spec.walls) blocked[w.row * W + w.col] = 1;
  if (blocked[from.row * W + from.col] || blocked[to.row * W + to.col]) return -1;
  std::deque<Cell> queue{from};
  dist[from.row * W + from.col] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == to) return dist[c.row * W + c.col];
    const Cell next[] = {{c.row - 1, c.col}, {c.row + 1, c.col},
                         {c.row, c.col - 1}, {c.row, c.col + 1}};
    for (Cell n : next) {
      if (n.row < 0 || n.col < 0 || n.row >= spec.height || n.col >= W) continue;
      const int i = n.row * W + n.col;
      if (blocked[i] || dist[i] >= 0) continue;
      dist[i] = dist[c.row * W + c.col] + 1;
      queue.push_back(n);
    }
  }
  return -1;
}

GridEnv build_maze(const MazeSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0 || spec.horizon <= 0) {
    fail(ErrorCode::kInvalidArgument, "maze dimensions and horizon must be positive");
  }
  auto inside = [&](Cell c) {
    return c.row >= 0 && c.col >= 0 && c.row < spec.height && c.col < spec.width;
  };
  if (!inside(spec.start) || !inside(spec.goal)) {
    fail(ErrorCode::kInvalidArgument, "start or goal outside the maze");
  }
  if (spec.is_wall(spec.start) || spec.is_wall(spec.goal)) {
    fail(ErrorCode::kInvalidArgument, "start and goal must be free cells");
  }
  const int d = maze_distance(spec, spec.start, spec.goal);
  // The goal has to be entered at step H-1 at the latest to pay anything.
  if (d < 0 || d > spec.horizon - 1) {
    fail(ErrorCode::kUnreachableGoal,
         "goal of '" + spec.name + "' is not reachable within H=" +
             std::to_string(spec.horizon));
  }

  GridEnv env;
  env.name = spec.name;
  env.width = spec.width;
  env.height = spec.height;
  env.goal = spec.goal;
  env.cell_state.assign(static_cast<std::size_t>(spec.width * spec.height), -1);
  std::vector<char> blocked(env.cell_state.size(), 0);
  for (Cell w : spec.walls) blocked[w.row * spec.width + w.col] = 1;
  std::vector<std::string> names;
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      if (blocked[r * spec.width + c]) continue;
      env.cell_state[r * spec.width + c] = static_cast<int>(env.cells.size());
      env.cells.push_back({r, c});
      names.push_back(cell_name({r, c}));
    }
  }

  const int H = spec.horizon;
  MdpBuilder builder(H, 4, std::vector<std::vector<std::string>>(H + 1, names));
  builder.set_start(env.state_of(spec.start));
  const StateIndex goal = env.state_of(spec.goal);
  for (int h = 0; h < H; ++h) {
    for (StateIndex s = 0; s < env.cells.size(); ++s) {
      const Cell c = env.cells[s];
      for (int a = 0; a < 4; ++a) {
        StateIndex next = s;
        if (s != goal) {
          Cell n = c;
          switch (a) {
            case kUp: --n.row; break;
            case kDown: ++n.row; break;
            case kLeft: --n.col; break;
            case kRight: ++n.col; break;
          }
          if (inside(n) && !blocked[n.row * spec.width + n.col]) next = env.state_of(n);
        }
        builder.set(h, s, a, s == goal ? 1.0 : 0.0, {{next, 1.0}});
      }
    }
  }
  env.mdp = builder.build();
  return env;
}

GridEnv build_chain(int length, int goal_index, int start_index, int horizon) {
  if (length <= 0 || horizon <= 0) {
    fail(ErrorCode::kInvalidArgument, "chain length and horizon must be positive");
  }
  if (goal_index < 0 || goal_index >= length || start_index < 0 || start_index >= length) {
    fail(ErrorCode::kInvalidArgument, "chain goal/start index out of range");
  }
  if (std::abs(goal_index - start_index) > horizon - 1) {
    fail(ErrorCode::kUnreachableGoal, "chain goal is not reachable within H");
  }
  GridEnv env;
  env.name = "chain" + std::to_string(length);
  env.width = length;
  env.height = 1;
  env.goal = {0, goal_index};
  std::vector<std::string> names;
  for (int i = 0; i < length; ++i) {
    env.cells.push_back({0, i});
    env.cell_state.push_back(i);
    names.push_back("s" + std::to_string(i));
  }
  MdpBuilder builder(horizon, 2, std::vector<std::vector<std::string>>(horizon + 1, names));
  builder.set_start(static_cast<StateIndex>(start_index));
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < length; ++s) {
      const bool at_goal = s == goal_index;
      const int left = at_goal ? s : std::max(0, s - 1);
      const int right = at_goal ? s : std::min(length - 1, s + 1);
      const double r = at_goal ? 1.0 : 0.0;
      builder.set(h, s, 0, r, {{static_cast<StateIndex>(left), 1.0}});
      builder.set(h, s, 1, r, {{static_cast<StateIndex>(right), 1.0}});
    }
  }
  env.mdp = builder.build();
  return env;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"grid8", "corridor10", "dcorridor10x20",
                                                 "chain11"};
  return names;
}

MazeSpec preset_spec(std::string_view name) {
  if (name == "grid8") return MazeSpec::from_ascii("grid8", open_grid_rows(8), 16);
  if (name == "corridor10") return MazeSpec::from_ascii("corridor10", kCorridor10, 24);
  if (name == "dcorridor10x20") {
    return MazeSpec::from_ascii("dcorridor10x20", double_corridor_rows(), 36);
  }
  fail(ErrorCode::kConfig, "unknown maze preset '" + std::string(name) + "'");
}

GridEnv build_preset(std::string_view name) {
  if (name == "chain11") {
    GridEnv env = build_chain(11, 0, 5, 13);
    env.name = "chain11";
    return env;
  }
  return build_maze(preset_spec(name));
}

}  // namespace sucbvi
