#include "gaplab/maze/maze.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include "json.hpp"

#include "gaplab/common/error.hpp"

namespace gaplab {

namespace {

constexpr int kDr[kMazeActions] = {-1, 1, 0, 0};
constexpr int kDc[kMazeActions] = {0, 0, -1, 1};

}  // namespace

std::string to_string(MazeAction a) {
  switch (a) {
    case MazeAction::kUp: return "up";
    case MazeAction::kDown: return "down";
    case MazeAction::kLeft: return "left";
    case MazeAction::kRight: return "right";
  }
  return "up";
}

Maze maze_generate(int size, Rng& rng) {
  require(size >= 5 && size % 2 == 1, "maze_generate: size must be odd and >= 5");
  Maze m;
  m.height = size;
  m.width = size;
  m.free.assign(static_cast<std::size_t>(size) * size, 0);
  m.max_steps = 4 * size * size;

  auto carve = [&](int r, int c) { m.free[static_cast<std::size_t>(r * size + c)] = 1; };

  // Depth-first carving over the lattice of cells at odd coordinates.
  const int n = (size - 1) / 2;
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(n) * n, 0);
  std::vector<std::pair<int, int>> stack;
  const int start_i = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
  const int start_j = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
  visited[static_cast<std::size_t>(start_i * n + start_j)] = 1;
  carve(2 * start_i + 1, 2 * start_j + 1);
  stack.emplace_back(start_i, start_j);
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    int options[kMazeActions];
    int n_options = 0;
    for (int d = 0; d < kMazeActions; ++d) {
      const int ni = i + kDr[d];
      const int nj = j + kDc[d];
      if (ni < 0 || ni >= n || nj < 0 || nj >= n) continue;
      if (!visited[static_cast<std::size_t>(ni * n + nj)]) options[n_options++] = d;
    }
    if (n_options == 0) {
      stack.pop_back();
      continue;
    }
    const int d = options[rng.uniform_index(static_cast<std::size_t>(n_options))];
    const int ni = i + kDr[d];
    const int nj = j + kDc[d];
    visited[static_cast<std::size_t>(ni * n + nj)] = 1;
    carve(2 * i + 1 + kDr[d], 2 * j + 1 + kDc[d]);
    carve(2 * ni + 1, 2 * nj + 1);
    stack.emplace_back(ni, nj);
  }

  std::vector<std::pair<int, int>> free_cells;
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      if (m.is_free(r, c)) free_cells.emplace_back(r, c);
  require(free_cells.size() >= 2, "maze_generate: not enough free cells");
  const auto start = free_cells[rng.uniform_index(free_cells.size())];
  auto goal = start;
  while (goal == start) goal = free_cells[rng.uniform_index(free_cells.size())];
  m.start_r = start.first;
  m.start_c = start.second;
  m.goal_r = goal.first;
  m.goal_c = goal.second;
  return m;
}

MazeState maze_reset(const Maze& maze) {
  MazeState s;
  s.r = maze.start_r;
  s.c = maze.start_c;
  s.t = 0;
  s.done = false;
  return s;
}

MazeStepResult maze_step(const Maze& maze, MazeState& state, MazeAction action) {
  require(!state.done, "maze_step: episode already done");
  const int d = static_cast<int>(action);
  const int nr = state.r + kDr[d];
  const int nc = state.c + kDc[d];
  if (maze.is_free(nr, nc)) {
    state.r = nr;
    state.c = nc;
  }
  MazeStepResult res;
  if (state.r == maze.goal_r && state.c == maze.goal_c) {
    res.reward = 1.0 - 0.9 * (static_cast<double>(state.t) / maze.max_steps);
    res.done = true;
  }
  state.t += 1;
  if (state.t >= maze.max_steps) res.done = true;
  state.done = res.done;
  return res;
}

std::vector<int> bfs_distances(const Maze& maze, int from_r, int from_c) {
  require(maze.is_free(from_r, from_c), "bfs_distances: source cell is not free");
  std::vector<int> dist(static_cast<std::size_t>(maze.height) * maze.width, -1);
  std::deque<std::pair<int, int>> queue;
  dist[static_cast<std::size_t>(from_r * maze.width + from_c)] = 0;
  queue.emplace_back(from_r, from_c);
  while (!queue.empty()) {
    const auto [r, c] = queue.front();
    queue.pop_front();
    const int base = dist[static_cast<std::size_t>(r * maze.width + c)];
    for (int d = 0; d < kMazeActions; ++d) {
      const int nr = r + kDr[d];
      const int nc = c + kDc[d];
      if (!maze.is_free(nr, nc)) continue;
      auto& slot = dist[static_cast<std::size_t>(nr * maze.width + nc)];
      if (slot < 0) {
        slot = base + 1;
        queue.emplace_back(nr, nc);
      }
    }
  }
  return dist;
}

MazeAction expert_action(const Maze& maze, const std::vector<int>& dist_to_goal, int r, int c) {
  const int here = dist_to_goal[static_cast<std::size_t>(r * maze.width + c)];
  require(here > 0, "expert_action: cell is the goal or unreachable");
  for (int d = 0; d < kMazeActions; ++d) {
    const int nr = r + kDr[d];
    const int nc = c + kDc[d];
    if (!maze.is_free(nr, nc)) continue;
    if (dist_to_goal[static_cast<std::size_t>(nr * maze.width + nc)] == here - 1)
      return static_cast<MazeAction>(d);
  }
  throw Error("expert_action: no descending neighbor (disconnected maze)");
}

MazeAction expert_policy_full(const Maze& maze, const MazeState& state) {
  const auto dist = bfs_distances(maze, maze.goal_r, maze.goal_c);
  return expert_action(maze, dist, state.r, state.c);
}

int maze_full_window(const Maze& maze) { return 2 * std::max(maze.height, maze.width) - 1; }

MazeObservation observe_maze(const Maze& maze, const MazeState& state, MazeObsMode mode, int k) {
  if (mode == MazeObsMode::kFull) k = maze_full_window(maze);
  require(k >= 1 && k % 2 == 1, "observe_maze: window size must be odd and >= 1");
  MazeObservation obs;
  obs.k = k;
  obs.agent_r = state.r;
  obs.agent_c = state.c;
  obs.patch.resize(static_cast<std::size_t>(k) * k);
  const int half = k / 2;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const int r = state.r - half + i;
      const int c = state.c - half + j;
      MazeCellView v;
      if (!maze.in_bounds(r, c)) {
        v = MazeCellView::kOutOfBounds;
      } else if (r == maze.goal_r && c == maze.goal_c) {
        v = MazeCellView::kGoal;
      } else {
        v = maze.is_free(r, c) ? MazeCellView::kFree : MazeCellView::kWall;
      }
      obs.patch[static_cast<std::size_t>(i * k + j)] = static_cast<std::uint8_t>(v);
    }
  }
  const bool in_window = std::abs(maze.goal_r - state.r) <= half &&
                         std::abs(maze.goal_c - state.c) <= half;
  obs.goal_visible = mode == MazeObsMode::kFull || in_window;
  if (obs.goal_visible) {
    obs.goal_dr = maze.goal_r - state.r;
    obs.goal_dc = maze.goal_c - state.c;
  }
  return obs;
}

int maze_feature_dim(int k) { return 4 * k * k + 10; }

std::vector<double> maze_features(const Maze& maze, const MazeObservation& obs, int prev_action,
                                  int t) {
  std::vector<double> f(static_cast<std::size_t>(maze_feature_dim(obs.k)), 0.0);
  std::size_t pos = 0;
  for (std::uint8_t cell : obs.patch) {
    f[pos + cell] = 1.0;
    pos += 4;
  }
  f[pos++] = static_cast<double>(obs.agent_r) / (maze.height - 1);
  f[pos++] = static_cast<double>(obs.agent_c) / (maze.width - 1);
  f[pos++] = obs.goal_visible ? 1.0 : 0.0;
  f[pos++] = static_cast<double>(obs.goal_dr) / (maze.height - 1);
  f[pos++] = static_cast<double>(obs.goal_dc) / (maze.width - 1);
  if (prev_action >= 0) {
    require(prev_action < kMazeActions, "maze_features: bad previous action");
    f[pos + static_cast<std::size_t>(prev_action)] = 1.0;
  }
  pos += kMazeActions;
  f[pos] = static_cast<double>(t) / maze.max_steps;
  return f;
}

void save_mazes(const std::string& path, const std::vector<Maze>& mazes) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "save_mazes: cannot open " + path);
  for (std::size_t idx = 0; idx < mazes.size(); ++idx) {
    const Maze& m = mazes[idx];
    nlohmann::json j;
    j["id"] = idx;
    j["schema_version"] = 1;
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(m.height));
    for (int r = 0; r < m.height; ++r) {
      std::string row(static_cast<std::size_t>(m.width), '#');
      for (int c = 0; c < m.width; ++c)
        if (m.is_free(r, c)) row[static_cast<std::size_t>(c)] = '.';
      rows.push_back(std::move(row));
    }
    j["grid"] = rows;
    j["start"] = {m.start_r, m.start_c};
    j["goal"] = {m.goal_r, m.goal_c};
    j["max_steps"] = m.max_steps;
    out << j.dump() << '\n';
  }
  require(out.good(), "save_mazes: write failed for " + path);
}

std::vector<Maze> load_mazes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_mazes: cannot open " + path);
  std::vector<Maze> mazes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": invalid JSON: " + e.what());
    }
    try {
      require(j.at("schema_version").get<int>() == 1, where + ": unsupported schema_version");
      Maze m;
      const auto& rows = j.at("grid");
      m.height = static_cast<int>(rows.size());
      require(m.height >= 5, where + ": grid too small");
      m.width = static_cast<int>(rows.at(0).get<std::string>().size());
      m.free.assign(static_cast<std::size_t>(m.height) * m.width, 0);
      for (int r = 0; r < m.height; ++r) {
        const std::string row = rows.at(static_cast<std::size_t>(r)).get<std::string>();
        require(static_cast<int>(row.size()) == m.width, where + ": ragged grid row");
        for (int c = 0; c < m.width; ++c) {
          const char ch = row[static_cast<std::size_t>(c)];
          require(ch == '#' || ch == '.', where + ": grid cells must be '#' or '.'");
          m.free[static_cast<std::size_t>(r * m.width + c)] = ch == '.' ? 1 : 0;
        }
      }
      m.start_r = j.at("start").at(0).get<int>();
      m.start_c = j.at("start").at(1).get<int>();
      m.goal_r = j.at("goal").at(0).get<int>();
      m.goal_c = j.at("goal").at(1).get<int>();
      m.max_steps = j.at("max_steps").get<int>();
      require(m.is_free(m.start_r, m.start_c) && m.is_free(m.goal_r, m.goal_c),
              where + ": start/goal must be free cells");
      require(m.start_r != m.goal_r || m.start_c != m.goal_c, where + ": start equals goal");
      require(m.max_steps > 0, where + ": max_steps must be positive");
      mazes.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return mazes;
}

}  // namespace gaplab
