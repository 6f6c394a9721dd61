#include "gaplab/learn/maze_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <utility>

#include "gaplab/common/csv.hpp"
#include "gaplab/common/error.hpp"

namespace gaplab {

namespace {

// One lane of episode state, shared between the simulated and the
// demonstration collectors.
struct Lane {
  Maze maze;
  MazeState state;
  int prev_action = -1;
};

Lane fresh_lane(int size, Rng& rng) {
  Lane lane;
  lane.maze = maze_generate(size, rng);
  lane.state = maze_reset(lane.maze);
  return lane;
}

void fill_feature_row(Matrix& feats, int row, const Lane& lane, MazeObsMode mode, int window) {
  const MazeObservation obs = observe_maze(lane.maze, lane.state, mode, window);
  const std::vector<double> f =
      maze_features(lane.maze, obs, lane.prev_action, lane.state.t);
  require(static_cast<int>(f.size()) == feats.cols,
          "maze train: feature width disagrees with the network input");
  for (int j = 0; j < feats.cols; ++j) feats.at(row, j) = f[static_cast<std::size_t>(j)];
}

// Action provider for demonstration rollouts.
class DemoExpert {
 public:
  virtual ~DemoExpert() = default;
  virtual void on_reset(int lane) = 0;
  virtual int act(int lane_index, const Lane& lane) = 0;
};

class ShortestPathExpert : public DemoExpert {
 public:
  explicit ShortestPathExpert(int lanes) : dist_(static_cast<std::size_t>(lanes)) {}

  void on_reset(int lane) override { dist_[static_cast<std::size_t>(lane)].clear(); }

  int act(int lane_index, const Lane& lane) override {
    std::vector<int>& dist = dist_[static_cast<std::size_t>(lane_index)];
    if (dist.empty()) dist = bfs_distances(lane.maze, lane.maze.goal_r, lane.maze.goal_c);
    return static_cast<int>(expert_action(lane.maze, dist, lane.state.r, lane.state.c));
  }

 private:
  std::vector<std::vector<int>> dist_;  // BFS field per lane, rebuilt per maze
};

class CheckpointExpert : public DemoExpert {
 public:
  CheckpointExpert(Checkpoint ckpt, MazeObsMode mode, int window, int lanes)
      : ckpt_(std::move(ckpt)),
        mode_(mode),
        window_(window),
        hidden_(lanes, ckpt_.net.rnn_hidden) {}

  void on_reset(int lane) override {
    for (int j = 0; j < hidden_.cols; ++j) hidden_.at(lane, j) = 0.0;
  }

  int act(int lane_index, const Lane& lane) override {
    Matrix feats(1, ckpt_.net.flat_dim);
    fill_feature_row(feats, 0, lane, mode_, window_);
    Matrix h(1, hidden_.cols);
    for (int j = 0; j < hidden_.cols; ++j) h.at(0, j) = hidden_.at(lane_index, j);
    const ForwardOut out = forward_flat(ckpt_.net, ckpt_.params, feats, h);
    for (int j = 0; j < hidden_.cols; ++j) hidden_.at(lane_index, j) = out.hidden.at(0, j);
    return greedy_action(out.logits, 0);
  }

 private:
  Checkpoint ckpt_;
  MazeObsMode mode_;
  int window_;
  Matrix hidden_;  // expert recurrent state per lane
};

std::unique_ptr<DemoExpert> make_expert(const MazeTrainOptions& opt, int lanes) {
  if (opt.demo_source == MazeDemoSource::kShortestPath)
    return std::make_unique<ShortestPathExpert>(lanes);
  Checkpoint ckpt = load_checkpoint(opt.demo_checkpoint);
  require(ckpt.net.encoder == EncoderKind::kFlat,
          "maze train: demo checkpoint does not hold a maze policy");
  const int w = maze_effective_window(opt.size, opt.demo_mode, opt.demo_window);
  require(ckpt.net.flat_dim == maze_feature_dim(w),
          "maze train: demo checkpoint was trained under different observation settings");
  require(ckpt.net.actions == kMazeActions, "maze train: demo checkpoint action count mismatch");
  return std::make_unique<CheckpointExpert>(std::move(ckpt), opt.demo_mode, w, lanes);
}

// Runs the policy for one segment, sampling actions and recording rewards.
// Lane state and the recurrent state persist across calls; the recorded
// initial_hidden lets the loss graph replay the exact forward passes.
RolloutBuffer collect_simulated(const NetConfig& net, const Params& params,
                                const TrainConfig& cfg, const MazeTrainOptions& opt,
                                int episode_size, std::vector<Lane>& lanes, Matrix& hidden,
                                Rng& maze_rng, Rng& action_rng) {
  const int window = maze_effective_window(opt.size, opt.mode, opt.window);
  RolloutBuffer buf;
  buf.batch = cfg.lanes;
  buf.steps = cfg.segment_len;
  buf.simulated = true;
  buf.initial_hidden = hidden;
  for (int s = 0; s < cfg.segment_len; ++s) {
    Matrix feats(cfg.lanes, net.flat_dim);
    for (int b = 0; b < cfg.lanes; ++b)
      fill_feature_row(feats, b, lanes[static_cast<std::size_t>(b)], opt.mode, window);
    const ForwardOut out = forward_flat(net, params, feats, hidden);
    hidden = out.hidden;
    buf.features.push_back(std::move(feats));
    buf.logits.push_back(out.logits);
    for (int b = 0; b < cfg.lanes; ++b) {
      Lane& lane = lanes[static_cast<std::size_t>(b)];
      const int a = sample_action(out.logits, b, action_rng);
      const MazeStepResult r = maze_step(lane.maze, lane.state, static_cast<MazeAction>(a));
      buf.actions.push_back(a);
      buf.values.push_back(out.value.at(b, 0));
      buf.rewards.push_back(r.reward);
      buf.dones.push_back(r.done ? 1.0 : 0.0);
      buf.mask.push_back(1.0);
      if (r.done)
        lane = fresh_lane(episode_size, maze_rng);
      else
        lane.prev_action = a;
      const double live = 1.0 - (r.done ? 1.0 : 0.0);
      for (int j = 0; j < hidden.cols; ++j) hidden.at(b, j) = hidden.at(b, j) * live;
    }
  }
  Matrix feats(cfg.lanes, net.flat_dim);
  for (int b = 0; b < cfg.lanes; ++b)
    fill_feature_row(feats, b, lanes[static_cast<std::size_t>(b)], opt.mode, window);
  const ForwardOut out = forward_flat(net, params, feats, hidden);
  for (int b = 0; b < cfg.lanes; ++b) buf.bootstrap.push_back(out.value.at(b, 0));
  return buf;
}

// Rolls expert demonstrations and records the imitator's view of them. The
// imitator network only supplies the recurrent carry between segments; the
// actions come from the expert.
RolloutBuffer collect_demos(const NetConfig& net, const Params& params, const TrainConfig& cfg,
                            const MazeTrainOptions& opt, std::vector<Lane>& lanes,
                            Matrix& hidden, DemoExpert& expert, Rng& maze_rng) {
  const int window = maze_effective_window(opt.size, opt.mode, opt.window);
  RolloutBuffer buf;
  buf.batch = cfg.lanes;
  buf.steps = cfg.segment_len;
  buf.simulated = false;
  buf.initial_hidden = hidden;
  for (int s = 0; s < cfg.segment_len; ++s) {
    Matrix feats(cfg.lanes, net.flat_dim);
    for (int b = 0; b < cfg.lanes; ++b)
      fill_feature_row(feats, b, lanes[static_cast<std::size_t>(b)], opt.mode, window);
    const ForwardOut out = forward_flat(net, params, feats, hidden);
    hidden = out.hidden;
    buf.features.push_back(std::move(feats));
    buf.logits.push_back(out.logits);
    for (int b = 0; b < cfg.lanes; ++b) {
      Lane& lane = lanes[static_cast<std::size_t>(b)];
      const int a = expert.act(b, lane);
      const MazeStepResult r = maze_step(lane.maze, lane.state, static_cast<MazeAction>(a));
      buf.actions.push_back(a);
      buf.values.push_back(out.value.at(b, 0));
      buf.dones.push_back(r.done ? 1.0 : 0.0);
      buf.mask.push_back(1.0);
      if (r.done) {
        lane = fresh_lane(opt.size, maze_rng);
        expert.on_reset(b);
      } else {
        lane.prev_action = a;
      }
      const double live = 1.0 - (r.done ? 1.0 : 0.0);
      for (int j = 0; j < hidden.cols; ++j) hidden.at(b, j) = hidden.at(b, j) * live;
    }
  }
  return buf;
}

}  // namespace

void MazeTrainOptions::validate(const TrainConfig& cfg) const {
  require(size >= 5 && size % 2 == 1, "maze train: size must be odd and >= 5");
  require(window >= 1 && window % 2 == 1, "maze train: window must be odd and >= 1");
  require(demo_window >= 1 && demo_window % 2 == 1,
          "maze train: demo window must be odd and >= 1");
  require(enc_hidden > 0 && embed_dim > 0 && rnn_hidden > 0 && value_hidden > 0,
          "maze train: network sizes must be positive");
  require(eval_every > 0 && eval_probes > 0, "maze train: probe settings must be positive");
  if (cfg.w_bc > 0.0)
    require(demo_source != MazeDemoSource::kNone,
            "maze train: BC weight needs a demonstration source");
  if (demo_source == MazeDemoSource::kCheckpoint)
    require(!demo_checkpoint.empty(), "maze train: checkpoint expert needs a file path");
  require(curriculum_sizes.size() == curriculum_fractions.size(),
          "maze train: curriculum sizes and fractions must pair up");
  if (!curriculum_sizes.empty()) {
    require(mode == MazeObsMode::kPartial,
            "maze train: the curriculum needs size-invariant partial observations");
    for (int s : curriculum_sizes)
      require(s >= 5 && s % 2 == 1, "maze train: curriculum sizes must be odd and >= 5");
    for (double f : curriculum_fractions)
      require(f > 0.0, "maze train: curriculum fractions must be positive");
  }
}

namespace {

// Maze size for fresh simulated episodes at a given update (1-based).
int curriculum_size_at(const MazeTrainOptions& opt, int update, int total_updates) {
  if (opt.curriculum_sizes.empty()) return opt.size;
  double total = 0.0;
  for (double f : opt.curriculum_fractions) total += f;
  double cum = 0.0;
  for (std::size_t i = 0; i < opt.curriculum_sizes.size(); ++i) {
    cum += opt.curriculum_fractions[i] / total;
    if (update <= cum * total_updates + 1e-9) return opt.curriculum_sizes[i];
  }
  return opt.curriculum_sizes.back();
}

}  // namespace

int maze_effective_window(int size, MazeObsMode mode, int window) {
  return mode == MazeObsMode::kFull ? 2 * size - 1 : window;
}

NetConfig maze_net_config(const MazeTrainOptions& opt) {
  NetConfig net;
  net.encoder = EncoderKind::kFlat;
  net.flat_dim = maze_feature_dim(maze_effective_window(opt.size, opt.mode, opt.window));
  net.enc_hidden = opt.enc_hidden;
  net.embed_dim = opt.embed_dim;
  net.rnn_hidden = opt.rnn_hidden;
  net.value_hidden = opt.value_hidden;
  net.actions = kMazeActions;
  return net;
}

std::vector<Maze> generate_mazes(int count, int size, Rng& rng) {
  std::vector<Maze> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(maze_generate(size, rng));
  return out;
}

double maze_episode_return(const Maze& maze, const NetConfig& net, const Params& params,
                           MazeObsMode mode, int window) {
  const int w = maze_effective_window(std::max(maze.height, maze.width), mode, window);
  Lane lane;
  lane.maze = maze;
  lane.state = maze_reset(maze);
  Matrix hidden(1, net.rnn_hidden);
  double total = 0.0;
  while (!lane.state.done) {
    Matrix feats(1, net.flat_dim);
    fill_feature_row(feats, 0, lane, mode, w);
    const ForwardOut out = forward_flat(net, params, feats, hidden);
    hidden = out.hidden;
    const int a = greedy_action(out.logits, 0);
    total += maze_step(lane.maze, lane.state, static_cast<MazeAction>(a)).reward;
    lane.prev_action = a;
  }
  return total;
}

double maze_mean_return(const std::vector<Maze>& mazes, const NetConfig& net,
                        const Params& params, MazeObsMode mode, int window) {
  require(!mazes.empty(), "maze eval: empty maze set");
  // All episodes advance in lock step so each timestep is one batched
  // forward pass; finished lanes stop stepping but stay in the batch.
  const int n = static_cast<int>(mazes.size());
  std::vector<Lane> lanes(static_cast<std::size_t>(n));
  std::vector<int> windows(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) {
    Lane& lane = lanes[static_cast<std::size_t>(b)];
    lane.maze = mazes[static_cast<std::size_t>(b)];
    lane.state = maze_reset(lane.maze);
    windows[static_cast<std::size_t>(b)] =
        maze_effective_window(std::max(lane.maze.height, lane.maze.width), mode, window);
  }
  Matrix hidden(n, net.rnn_hidden);
  Matrix feats(n, net.flat_dim);
  double sum = 0.0;
  int active = n;
  while (active > 0) {
    for (int b = 0; b < n; ++b)
      if (!lanes[static_cast<std::size_t>(b)].state.done)
        fill_feature_row(feats, b, lanes[static_cast<std::size_t>(b)], mode,
                         windows[static_cast<std::size_t>(b)]);
    const ForwardOut out = forward_flat(net, params, feats, hidden);
    hidden = out.hidden;
    for (int b = 0; b < n; ++b) {
      Lane& lane = lanes[static_cast<std::size_t>(b)];
      if (lane.state.done) continue;
      const int a = greedy_action(out.logits, b);
      const MazeStepResult r = maze_step(lane.maze, lane.state, static_cast<MazeAction>(a));
      sum += r.reward;
      lane.prev_action = a;
      if (r.done) --active;
    }
  }
  return sum / static_cast<double>(n);
}

Checkpoint train_maze(const TrainConfig& cfg, const MazeTrainOptions& opt,
                      const std::string& out_dir) {
  cfg.validate();
  opt.validate(cfg);
  std::filesystem::create_directories(out_dir);

  const NetConfig net = maze_net_config(opt);
  net.validate();

  const Rng master(static_cast<std::uint64_t>(cfg.seed));
  Rng init_rng = master.child("init");
  Rng sim_maze_rng = master.child("sim-mazes");
  Rng action_rng = master.child("action-sampling");
  Rng demo_maze_rng = master.child("demo-mazes");
  Rng probe_rng = master.child("probe-mazes");

  Params params = init_policy_params(net, init_rng);
  AdamConfig adam_cfg;
  adam_cfg.lr_max = cfg.lr_max;
  adam_cfg.total_steps = cfg.total_updates;
  Adam optimizer(adam_cfg, params.total_size());

  const std::vector<Maze> probes = generate_mazes(opt.eval_probes, opt.size, probe_rng);

  const bool wants_rl = cfg.w_rl > 0.0;
  const bool wants_bc = cfg.w_bc > 0.0;

  std::vector<Lane> sim_lanes;
  Matrix sim_hidden(cfg.lanes, net.rnn_hidden);
  if (wants_rl) {
    const int first_size = curriculum_size_at(opt, 1, cfg.total_updates);
    for (int b = 0; b < cfg.lanes; ++b) sim_lanes.push_back(fresh_lane(first_size, sim_maze_rng));
  }

  std::vector<Lane> demo_lanes;
  Matrix demo_hidden(cfg.lanes, net.rnn_hidden);
  std::unique_ptr<DemoExpert> expert;
  if (wants_bc) {
    expert = make_expert(opt, cfg.lanes);
    for (int b = 0; b < cfg.lanes; ++b) {
      demo_lanes.push_back(fresh_lane(opt.size, demo_maze_rng));
      expert->on_reset(b);
    }
  }

  csv::Table log;
  log.header = {"update",      "bc_loss",      "rl_loss",      "combined_loss",
                "mean_reward", "overlap_rate", "offroad_rate", "lr"};
  const std::string log_path = (std::filesystem::path(out_dir) / "log.csv").string();

  double probe_return = 0.0;
  Checkpoint ckpt;
  ckpt.net = net;
  ckpt.run_config = opt.run_config;

  for (int update = 1; update <= cfg.total_updates; ++update) {
    RolloutBuffer sim, demos;
    if (wants_rl)
      sim = collect_simulated(net, params, cfg, opt,
                              curriculum_size_at(opt, update, cfg.total_updates), sim_lanes,
                              sim_hidden, sim_maze_rng, action_rng);
    if (wants_bc)
      demos = collect_demos(net, params, cfg, opt, demo_lanes, demo_hidden, *expert,
                            demo_maze_rng);

    const double lr = optimizer.lr();
    const UpdateDiagnostics diag =
        combined_update(net, params, optimizer, wants_bc ? &demos : nullptr,
                        wants_rl ? &sim : nullptr, cfg);

    if (!std::isfinite(diag.combined_loss) || !std::isfinite(diag.bc_loss) ||
        !std::isfinite(diag.rl_loss)) {
      ckpt.params = params;
      ckpt.update = update;
      const std::string dump =
          (std::filesystem::path(out_dir) / "dump_nonfinite.bin").string();
      save_checkpoint(dump, ckpt);
      csv::write_file(log_path, log);
      throw Error("maze train: non-finite loss at update " + std::to_string(update) +
                  " (bc=" + csv::format_double(diag.bc_loss) +
                  ", rl=" + csv::format_double(diag.rl_loss) + "); snapshot written to " + dump);
    }

    if (update == 1 || update % opt.eval_every == 0 || update == cfg.total_updates)
      probe_return = maze_mean_return(probes, net, params, opt.mode, opt.window);

    log.rows.push_back({std::to_string(update), csv::format_double(diag.bc_loss),
                        csv::format_double(diag.rl_loss),
                        csv::format_double(diag.combined_loss),
                        csv::format_double(probe_return), csv::format_double(0.0),
                        csv::format_double(0.0), csv::format_double(lr)});

    if (update % cfg.checkpoint_every == 0 || update == cfg.total_updates) {
      ckpt.params = params;
      ckpt.update = update;
      save_checkpoint((std::filesystem::path(out_dir) / checkpoint_name(update)).string(),
                      ckpt);
      csv::write_file(log_path, log);
    }
  }

  csv::write_file(log_path, log);
  ckpt.params = params;
  ckpt.update = cfg.total_updates;
  return ckpt;
}

}  // namespace gaplab
