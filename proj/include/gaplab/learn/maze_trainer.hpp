#pragma once

#include <string>
#include <vector>

#include "gaplab/learn/losses.hpp"
#include "gaplab/maze/maze.hpp"
#include "gaplab/nn/checkpoint.hpp"

namespace gaplab {

/// Where behavior-cloning targets come from. The shortest-path expert reads
/// the true grid, so its demonstrations carry information a partial observer
/// cannot recover; a checkpoint expert replays an earlier policy under its
/// own observation settings.
enum class MazeDemoSource { kNone, kShortestPath, kCheckpoint };

struct MazeTrainOptions {
  int size = 13;
  MazeObsMode mode = MazeObsMode::kPartial;
  int window = 3;  // receptive field in partial mode

  MazeDemoSource demo_source = MazeDemoSource::kNone;
  std::string demo_checkpoint;  // policy file for MazeDemoSource::kCheckpoint
  MazeObsMode demo_mode = MazeObsMode::kPartial;
  int demo_window = 3;

  int enc_hidden = 48;
  int embed_dim = 48;
  int rnn_hidden = 48;
  int value_hidden = 32;

  int eval_every = 10;   // probe cadence, in updates
  int eval_probes = 16;  // fixed probe mazes behind the mean_reward column

  /// Optional maze-size curriculum for the simulated lanes: phase i runs
  /// curriculum_sizes[i] for curriculum_fractions[i] of the updates, and
  /// fresh episodes pick up the phase's size. Partial-mode features are
  /// normalized, so one policy spans all sizes. Demonstrations and probe
  /// mazes always use the target size.
  std::vector<int> curriculum_sizes;
  std::vector<double> curriculum_fractions;

  std::string run_config;  // canonical config text stored in checkpoints

  void validate(const TrainConfig& cfg) const;
};

/// Window actually rendered for a mode: partial keeps the receptive field,
/// full widens it to cover the grid from any cell.
int maze_effective_window(int size, MazeObsMode mode, int window);

NetConfig maze_net_config(const MazeTrainOptions& opt);

std::vector<Maze> generate_mazes(int count, int size, Rng& rng);

/// Greedy-action episode on one maze; returns the episodic return.
double maze_episode_return(const Maze& maze, const NetConfig& net, const Params& params,
                           MazeObsMode mode, int window);

double maze_mean_return(const std::vector<Maze>& mazes, const NetConfig& net,
                        const Params& params, MazeObsMode mode, int window);

/// Update loop over vectorized maze lanes: simulated segments feed the PPO
/// term, freshly rolled demonstrations feed the BC term, both gated by the
/// configured weights. Writes log.csv and periodic ckpt_<update>.bin files
/// into out_dir and returns the final checkpoint. Throws on a non-finite
/// loss after dumping the offending snapshot.
Checkpoint train_maze(const TrainConfig& cfg, const MazeTrainOptions& opt,
                      const std::string& out_dir);

}  // namespace gaplab
