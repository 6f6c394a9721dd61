#include "gaplab/learn/driving_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <utility>

#include "gaplab/common/csv.hpp"
#include "gaplab/common/error.hpp"
#include "gaplab/core/kinematics.hpp"
#include "gaplab/driving/sim.hpp"

namespace gaplab {

namespace {

// Net inputs per episode: observations of t = 0..89. The first 9 are context
// warm-up (mask 0); the remaining 81 each precede a controlled transition.
constexpr int kEpisodeSteps = kScenarioSteps - 1;

SceneBatch make_scene(const NetConfig& net, int batch) {
  SceneBatch sb;
  sb.batch = batch;
  sb.obj = Matrix(batch * net.max_objects, net.object_dim);
  sb.obj_mask = Matrix(batch * net.max_objects, 1);
  sb.road = Matrix(batch * net.max_road_points, net.road_dim);
  sb.road_mask = Matrix(batch * net.max_road_points, 1);
  sb.ego_speed = Matrix(batch, 1);
  return sb;
}

void fill_scene_lane(SceneBatch& sb, const NetConfig& net, int b, const Observation& o) {
  require(o.max_objects == net.max_objects && o.max_road_points == net.max_road_points,
          "driving train: observation shape disagrees with the network");
  for (int i = 0; i < net.max_objects; ++i) {
    const int row = b * net.max_objects + i;
    for (int c = 0; c < Observation::kObjectFeatures; ++c) sb.obj.at(row, c) = o.object(i, c);
    sb.obj_mask.at(row, 0) = o.object(i, 7);
  }
  for (int i = 0; i < net.max_road_points; ++i) {
    const int row = b * net.max_road_points + i;
    for (int c = 0; c < Observation::kRoadFeatures; ++c) sb.road.at(row, c) = o.road(i, c);
    sb.road_mask.at(row, 0) = o.road(i, 5);
  }
  sb.ego_speed.at(b, 0) = o.ego_speed;
}

enum class RolloutKind { kLogged, kSimulated };

// One scenario batch rolled end to end. Lanes are independent episodes with
// their own rng streams, so the buffer is identical however the batch is
// assembled elsewhere.
RolloutBuffer collect_driving(const std::vector<const Scenario*>& batch, const NetConfig& net,
                              const Params& params, const DrivingTrainOptions& opt,
                              RolloutKind kind, const Rng& rng) {
  const int B = static_cast<int>(batch.size());
  RolloutBuffer buf;
  buf.batch = B;
  buf.steps = kEpisodeSteps;
  buf.simulated = kind == RolloutKind::kSimulated;
  buf.initial_hidden = Matrix(B, net.rnn_hidden);

  std::vector<SimState> states;
  states.reserve(static_cast<std::size_t>(B));
  std::vector<Rng> lane_rngs;
  lane_rngs.reserve(static_cast<std::size_t>(B));
  std::vector<std::vector<Observation>> ctx(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    lane_rngs.push_back(rng.child("lane", static_cast<std::uint64_t>(b)));
    const Scenario& s = *batch[static_cast<std::size_t>(b)];
    ctx[static_cast<std::size_t>(b)] = replay_context(s, opt.obs, lane_rngs.back());
    states.push_back(reset(s, opt.obs, true, lane_rngs.back()).first);
  }

  std::vector<Observation> input(static_cast<std::size_t>(B));
  Matrix hidden(B, net.rnn_hidden);
  for (int s = 0; s < kEpisodeSteps; ++s) {
    SceneBatch sb = make_scene(net, B);
    for (int b = 0; b < B; ++b)
      fill_scene_lane(sb, net, b,
                      s < kContextSteps ? ctx[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)]
                                        : input[static_cast<std::size_t>(b)]);
    const ForwardOut out = forward_scene(net, params, sb, hidden);
    hidden = out.hidden;
    buf.scenes.push_back(std::move(sb));
    buf.logits.push_back(out.logits);
    const bool warmup = s < kContextSteps - 1;
    for (int b = 0; b < B; ++b) {
      buf.values.push_back(out.value.at(b, 0));
      if (warmup) {
        buf.actions.push_back(0);
        if (buf.simulated) buf.rewards.push_back(0.0);
        buf.dones.push_back(0.0);
        buf.mask.push_back(0.0);
        continue;
      }
      SimState& st = states[static_cast<std::size_t>(b)];
      Rng& lane_rng = lane_rngs[static_cast<std::size_t>(b)];
      const double yaw = st.ego().pose.yaw;
      int idx = 0;
      if (kind == RolloutKind::kSimulated) {
        idx = sample_action(out.logits, b, lane_rng);
      } else {
        const DeltaAction toward = expert_action_toward_log(st);
        idx = opt.discretizer.discretize(delta_world_to_local(toward, yaw));
      }
      const DeltaAction world = delta_local_to_world(opt.discretizer.undiscretize(idx), yaw);
      StepResult res = step(st, world, opt.obs, lane_rng);
      input[static_cast<std::size_t>(b)] = std::move(res.observation);
      buf.actions.push_back(idx);
      if (buf.simulated) buf.rewards.push_back(res.reward);
      buf.dones.push_back(res.done ? 1.0 : 0.0);
      buf.mask.push_back(1.0);
    }
  }
  // Every lane ends exactly at the terminal state, so nothing is bootstrapped.
  if (buf.simulated) buf.bootstrap.assign(static_cast<std::size_t>(B), 0.0);
  return buf;
}

void fisher_yates(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

}  // namespace

void DrivingTrainOptions::validate() const {
  obs.validate();
  require(enc_hidden > 0 && embed_dim > 0 && rnn_hidden > 0 && value_hidden > 0,
          "driving train: network sizes must be positive");
  require(eval_every > 0 && eval_probes > 0, "driving train: probe settings must be positive");
}

NetConfig driving_net_config(const DrivingTrainOptions& opt) {
  NetConfig net;
  net.encoder = EncoderKind::kScene;
  net.object_dim = Observation::kObjectFeatures;
  net.road_dim = Observation::kRoadFeatures;
  net.max_objects = opt.obs.max_objects;
  net.max_road_points = opt.obs.max_road_points;
  net.enc_hidden = opt.enc_hidden;
  net.embed_dim = opt.embed_dim;
  net.rnn_hidden = opt.rnn_hidden;
  net.value_hidden = opt.value_hidden;
  net.actions = opt.discretizer.actions();
  return net;
}

double expert_saturation_rate(const std::vector<Scenario>& corpus,
                              const ActionDiscretizer& disc) {
  require(!corpus.empty(), "saturation rate: empty corpus");
  std::size_t saturated = 0;
  std::size_t total = 0;
  for (const Scenario& s : corpus) {
    const std::vector<DeltaAction> acts = expert_actions(s);
    const std::vector<AgentState>& ego = s.ego_track();
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const double yaw = ego[static_cast<std::size_t>(kContextSteps) - 1 + i].pose.yaw;
      bool sat = false;
      disc.discretize(delta_world_to_local(acts[i], yaw), &sat);
      if (sat) ++saturated;
      ++total;
    }
  }
  return static_cast<double>(saturated) / static_cast<double>(total);
}

std::vector<DrivingEpisodeStats> driving_greedy_rollouts(
    const std::vector<Scenario>& scenarios, const NetConfig& net, const Params& params,
    const ObservationConfig& obs_cfg, const ActionDiscretizer& disc, const Rng& rng) {
  require(!scenarios.empty(), "driving eval: empty scenario set");
  require(net.encoder == EncoderKind::kScene, "driving eval: needs a scene-encoder policy");
  require(disc.actions() == net.actions, "driving eval: discretizer size disagrees with the net");
  const int B = static_cast<int>(scenarios.size());

  std::vector<SimState> states;
  states.reserve(static_cast<std::size_t>(B));
  std::vector<Rng> lane_rngs;
  lane_rngs.reserve(static_cast<std::size_t>(B));
  std::vector<std::vector<Observation>> ctx(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    lane_rngs.push_back(rng.child("lane", static_cast<std::uint64_t>(b)));
    ctx[static_cast<std::size_t>(b)] =
        replay_context(scenarios[static_cast<std::size_t>(b)], obs_cfg, lane_rngs.back());
    states.push_back(reset(scenarios[static_cast<std::size_t>(b)], obs_cfg, true,
                           lane_rngs.back())
                         .first);
  }

  std::vector<DrivingEpisodeStats> stats(static_cast<std::size_t>(B));
  std::vector<Observation> input(static_cast<std::size_t>(B));
  Matrix hidden(B, net.rnn_hidden);
  for (int s = 0; s < kEpisodeSteps; ++s) {
    SceneBatch sb = make_scene(net, B);
    for (int b = 0; b < B; ++b)
      fill_scene_lane(sb, net, b,
                      s < kContextSteps ? ctx[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)]
                                        : input[static_cast<std::size_t>(b)]);
    const ForwardOut out = forward_scene(net, params, sb, hidden);
    hidden = out.hidden;
    if (s < kContextSteps - 1) continue;
    for (int b = 0; b < B; ++b) {
      SimState& st = states[static_cast<std::size_t>(b)];
      const double yaw = st.ego().pose.yaw;
      const int idx = greedy_action(out.logits, b);
      const DeltaAction world = delta_local_to_world(disc.undiscretize(idx), yaw);
      StepResult res = step(st, world, obs_cfg, lane_rngs[static_cast<std::size_t>(b)]);
      input[static_cast<std::size_t>(b)] = std::move(res.observation);
      DrivingEpisodeStats& row = stats[static_cast<std::size_t>(b)];
      row.episode_return += res.reward;
      row.overlap_any = row.overlap_any || res.metrics.overlap;
      row.offroad_any = row.offroad_any || res.metrics.offroad;
      row.overlap_steps += res.metrics.overlap ? 1 : 0;
      row.offroad_steps += res.metrics.offroad ? 1 : 0;
      row.max_log_divergence = std::max(row.max_log_divergence, res.metrics.log_divergence);
      row.mean_log_divergence += res.metrics.log_divergence;
    }
  }
  for (DrivingEpisodeStats& row : stats) row.mean_log_divergence /= kHorizonSteps;
  return stats;
}

DrivingTrajectory driving_greedy_trajectory(const Scenario& s, const NetConfig& net,
                                            const Params& params,
                                            const ObservationConfig& obs_cfg,
                                            const ActionDiscretizer& disc, const Rng& rng) {
  require(net.encoder == EncoderKind::kScene, "driving eval: needs a scene-encoder policy");
  require(disc.actions() == net.actions, "driving eval: discretizer size disagrees with the net");

  Rng lane_rng = rng.child("lane", 0);
  const std::vector<Observation> ctx = replay_context(s, obs_cfg, lane_rng);
  SimState st = reset(s, obs_cfg, true, lane_rng).first;

  DrivingTrajectory traj;
  traj.states.reserve(kScenarioSteps);
  for (int t = 0; t < kContextSteps; ++t) {
    std::vector<AgentState> frame;
    frame.reserve(s.tracks.size());
    for (const std::vector<AgentState>& track : s.tracks)
      frame.push_back(track[static_cast<std::size_t>(t)]);
    traj.states.push_back(std::move(frame));
  }

  Observation input;
  Matrix hidden(1, net.rnn_hidden);
  for (int step_i = 0; step_i < kEpisodeSteps; ++step_i) {
    SceneBatch sb = make_scene(net, 1);
    fill_scene_lane(sb, net, 0, step_i < kContextSteps ? ctx[static_cast<std::size_t>(step_i)] : input);
    const ForwardOut out = forward_scene(net, params, sb, hidden);
    hidden = out.hidden;
    if (step_i < kContextSteps - 1) continue;
    const double yaw = st.ego().pose.yaw;
    const int idx = greedy_action(out.logits, 0);
    const DeltaAction world = delta_local_to_world(disc.undiscretize(idx), yaw);
    StepResult res = step(st, world, obs_cfg, lane_rng);
    input = std::move(res.observation);
    traj.states.push_back(st.current);
    traj.metrics.push_back(res.metrics);
    traj.actions.push_back(idx);
  }
  return traj;
}

Checkpoint train_driving(const TrainConfig& cfg, const DrivingTrainOptions& opt,
                         const std::vector<Scenario>& corpus, const std::string& out_dir) {
  cfg.validate();
  opt.validate();
  require(!corpus.empty(), "driving train: empty corpus");
  const double saturation = expert_saturation_rate(corpus, opt.discretizer);
  require(saturation < 0.25, "driving train: discretizer ranges miss " +
                                 csv::format_double(100.0 * saturation) +
                                 "% of the corpus's expert actions");
  std::filesystem::create_directories(out_dir);

  const NetConfig net = driving_net_config(opt);
  net.validate();

  const Rng master(cfg.seed);
  Rng init_rng = master.child("init");
  Params params = init_policy_params(net, init_rng);
  AdamConfig adam_cfg;
  adam_cfg.lr_max = cfg.lr_max;
  adam_cfg.total_steps = cfg.total_updates;
  Adam optimizer(adam_cfg, params.total_size());

  const int probe_count = std::min(opt.eval_probes, static_cast<int>(corpus.size()));
  const std::vector<Scenario> probes(corpus.begin(), corpus.begin() + probe_count);

  const bool wants_rl = cfg.w_rl > 0.0;
  const bool wants_bc = cfg.w_bc > 0.0;

  // Epoch-shuffled pass over the corpus, cfg.lanes scenarios per update.
  Rng order_rng = master.child("batch-order");
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  const auto next_batch = [&]() {
    std::vector<const Scenario*> batch;
    batch.reserve(static_cast<std::size_t>(cfg.lanes));
    for (int i = 0; i < cfg.lanes; ++i) {
      if (cursor >= order.size()) {
        fisher_yates(order, order_rng);
        cursor = 0;
      }
      batch.push_back(&corpus[static_cast<std::size_t>(order[cursor++])]);
    }
    return batch;
  };

  csv::Table log;
  log.header = {"update",      "bc_loss",      "rl_loss",      "combined_loss",
                "mean_reward", "overlap_rate", "offroad_rate", "lr"};
  const std::string log_path = (std::filesystem::path(out_dir) / "log.csv").string();

  double probe_return = 0.0;
  double probe_overlap = 0.0;
  double probe_offroad = 0.0;
  Checkpoint ckpt;
  ckpt.net = net;
  ckpt.run_config = opt.run_config;

  for (int update = 1; update <= cfg.total_updates; ++update) {
    const std::vector<const Scenario*> batch = next_batch();
    const Rng update_rng = master.child("update", static_cast<std::uint64_t>(update));
    RolloutBuffer logged, sim;
    if (wants_bc)
      logged = collect_driving(batch, net, params, opt, RolloutKind::kLogged,
                               update_rng.child("logged"));
    if (wants_rl)
      sim = collect_driving(batch, net, params, opt, RolloutKind::kSimulated,
                            update_rng.child("sim"));

    const double lr = optimizer.lr();
    const UpdateDiagnostics diag =
        combined_update(net, params, optimizer, wants_bc ? &logged : nullptr,
                        wants_rl ? &sim : nullptr, cfg);

    if (!std::isfinite(diag.combined_loss) || !std::isfinite(diag.bc_loss) ||
        !std::isfinite(diag.rl_loss)) {
      ckpt.params = params;
      ckpt.update = update;
      const std::string dump =
          (std::filesystem::path(out_dir) / "dump_nonfinite.bin").string();
      save_checkpoint(dump, ckpt);
      csv::write_file(log_path, log);
      throw Error("driving train: non-finite loss at update " + std::to_string(update) +
                  " (bc=" + csv::format_double(diag.bc_loss) +
                  ", rl=" + csv::format_double(diag.rl_loss) + "); snapshot written to " + dump);
    }

    if (update == 1 || update % opt.eval_every == 0 || update == cfg.total_updates) {
      const std::vector<DrivingEpisodeStats> rows = driving_greedy_rollouts(
          probes, net, params, opt.obs, opt.discretizer,
          master.child("probe", static_cast<std::uint64_t>(update)));
      probe_return = probe_overlap = probe_offroad = 0.0;
      for (const DrivingEpisodeStats& row : rows) {
        probe_return += row.episode_return;
        probe_overlap += row.overlap_any ? 1.0 : 0.0;
        probe_offroad += row.offroad_any ? 1.0 : 0.0;
      }
      probe_return /= static_cast<double>(rows.size());
      probe_overlap /= static_cast<double>(rows.size());
      probe_offroad /= static_cast<double>(rows.size());
    }

    log.rows.push_back({std::to_string(update), csv::format_double(diag.bc_loss),
                        csv::format_double(diag.rl_loss),
                        csv::format_double(diag.combined_loss),
                        csv::format_double(probe_return), csv::format_double(probe_overlap),
                        csv::format_double(probe_offroad), csv::format_double(lr)});

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
