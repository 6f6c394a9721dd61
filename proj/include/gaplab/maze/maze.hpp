#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaplab/common/rng.hpp"

namespace gaplab {

/// Grid actions in deterministic tie-break order: the shortest-path expert
/// prefers up over down over left over right when several moves are optimal.
enum class MazeAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
constexpr int kMazeActions = 4;

std::string to_string(MazeAction a);

/// Rectangular grid of wall/free cells with one start and one goal.
/// The outer ring is always wall; the free cells form a perfect maze
/// (exactly one simple path between any two free cells).
struct Maze {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> free;  // row-major, 1 = walkable
  int start_r = 0, start_c = 0;
  int goal_r = 0, goal_c = 0;
  int max_steps = 0;

  bool in_bounds(int r, int c) const { return r >= 0 && r < height && c >= 0 && c < width; }
  bool is_free(int r, int c) const {
    return in_bounds(r, c) && free[static_cast<std::size_t>(r * width + c)] != 0;
  }
};

/// Carves a size x size perfect maze by randomized depth-first search on the
/// odd-coordinate cell lattice, then picks distinct random free start and
/// goal cells. max_steps = 4 * height * width. size must be odd and >= 5.
Maze maze_generate(int size, Rng& rng);

struct MazeState {
  int r = 0;
  int c = 0;
  int t = 0;
  bool done = false;
};

MazeState maze_reset(const Maze& maze);

struct MazeStepResult {
  double reward = 0.0;
  bool done = false;
};

/// Moves one cell in the given direction when the target cell is free,
/// otherwise stays in place. Reaching the goal yields 1 - 0.9 * (t /
/// max_steps) with t the step count before this move; episodes also end
/// (reward 0) once max_steps moves are spent. Throws on stepping a done
/// episode.
MazeStepResult maze_step(const Maze& maze, MazeState& state, MazeAction action);

/// Breadth-first distances from (from_r, from_c) over free cells; -1 for
/// unreachable or wall cells.
std::vector<int> bfs_distances(const Maze& maze, int from_r, int from_c);

/// First move of a shortest path from (r, c) to the goal, given distances
/// from bfs_distances(maze, goal). Ties resolve in MazeAction order.
MazeAction expert_action(const Maze& maze, const std::vector<int>& dist_to_goal, int r, int c);

/// Convenience wrapper that recomputes the BFS distance field per call.
MazeAction expert_policy_full(const Maze& maze, const MazeState& state);

enum class MazeObsMode { kFull, kPartial };

enum class MazeCellView : std::uint8_t { kWall = 0, kFree = 1, kGoal = 2, kOutOfBounds = 3 };

/// Egocentric view: a k x k cell window centered on the agent, plus the
/// goal offset when known. Partial mode uses the configured receptive field
/// and hides the goal offset whenever the goal lies outside the window; full
/// mode widens the window until it covers the whole grid from any cell and
/// always reports the exact goal offset.
struct MazeObservation {
  int k = 0;
  std::vector<std::uint8_t> patch;  // k*k MazeCellView values, row-major
  bool goal_visible = false;
  int goal_dr = 0, goal_dc = 0;  // goal - agent, zeros when not visible
  int agent_r = 0, agent_c = 0;  // own position, known in both modes

  bool operator==(const MazeObservation& other) const = default;
};

/// Window size used by full-mode observations for a given grid.
int maze_full_window(const Maze& maze);

MazeObservation observe_maze(const Maze& maze, const MazeState& state, MazeObsMode mode,
                             int k = 3);

/// Flat feature vector for policy networks: patch one-hot (4 per cell),
/// normalized agent position, goal visibility flag, normalized goal offset,
/// previous-action one-hot (zeros before the first move) and time fraction.
/// Length = 4 * k * k + 10.
int maze_feature_dim(int k);
std::vector<double> maze_features(const Maze& maze, const MazeObservation& obs, int prev_action,
                                  int t);

/// JSON-Lines corpus: one maze per line, grid rows as strings of '#' and '.'.
void save_mazes(const std::string& path, const std::vector<Maze>& mazes);
std::vector<Maze> load_mazes(const std::string& path);

}  // namespace gaplab
