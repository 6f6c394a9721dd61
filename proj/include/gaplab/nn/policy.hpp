#pragma once

#include <string>
#include <vector>

#include "gaplab/common/rng.hpp"
#include "gaplab/nn/params.hpp"
#include "gaplab/nn/tape.hpp"

namespace gaplab {

enum class EncoderKind { kFlat, kScene };

/// Network family shared by both environments: an encoder producing a fixed
/// embedding per timestep, a GRU trunk, a softmax action head and an MLP
/// value head. The scene encoder pools per-object and per-road-point MLPs
/// over validity masks; the flat encoder is a plain two-layer MLP.
struct NetConfig {
  EncoderKind encoder = EncoderKind::kScene;
  int flat_dim = 0;  // flat encoder input width
  int object_dim = 8;
  int road_dim = 6;
  int max_objects = 8;
  int max_road_points = 32;
  int enc_hidden = 64;
  int embed_dim = 64;
  int rnn_hidden = 128;
  int value_hidden = 64;
  int actions = 256;

  int rnn_input_dim() const {
    return encoder == EncoderKind::kScene ? 2 * embed_dim + 1 : embed_dim;
  }
  void validate() const;
};

/// Fill with uniform values scaled by fan-in and fan-out.
void init_glorot(Matrix& m, Rng& rng);
/// Orthonormal rows or columns (whichever fit) from Gram-Schmidt on a
/// Gaussian draw.
void init_orthogonal(Matrix& m, Rng& rng);

/// Builds the parameter set for a config; recurrent matrices are orthogonal,
/// the action head is scaled down so the initial policy is near-uniform.
Params init_policy_params(const NetConfig& cfg, Rng& rng);

/// One timestep of a batch for the scene encoder. Object rows are grouped
/// per batch element: row b * max_objects + i belongs to element b.
struct SceneBatch {
  Matrix obj;        // [B*max_objects x object_dim]
  Matrix obj_mask;   // [B*max_objects x 1]
  Matrix road;       // [B*max_road_points x road_dim]
  Matrix road_mask;  // [B*max_road_points x 1]
  Matrix ego_speed;  // [B x 1]
  int batch = 0;
};

struct ForwardOut {
  Matrix logits;  // [B x actions]
  Matrix value;   // [B x 1]
  Matrix hidden;  // [B x rnn_hidden]
};

/// Plain (non-recording) forward passes for rollout collection. These use
/// the same raw routines as the taped path, so values agree bitwise.
ForwardOut forward_scene(const NetConfig& cfg, const Params& p, const SceneBatch& in,
                         const Matrix& hidden);
ForwardOut forward_flat(const NetConfig& cfg, const Params& p, const Matrix& features,
                        const Matrix& hidden);

/// Parameter leaves registered on a tape plus the step functions that build
/// the recorded graph. Gradients read back in flat layout after backward.
class TapedPolicy {
 public:
  TapedPolicy(Tape& tape, const NetConfig& cfg, const Params& params);

  struct StepOut {
    Var logits;
    Var value;
    Var hidden;
  };
  StepOut step_scene(Tape& tape, const SceneBatch& in, Var hidden) const;
  StepOut step_flat(Tape& tape, Var features, Var hidden) const;

  Var param(const std::string& name) const;
  /// Gradient vector aligned with Params::flatten order.
  std::vector<double> grad_flat(const Tape& tape) const;

 private:
  StepOut step_trunk(Tape& tape, Var trunk, Var hidden) const;

  NetConfig cfg_;
  std::vector<std::pair<std::string, Var>> leaves_;
};

/// Categorical sample from one row of logits.
int sample_action(const Matrix& logits, int row, Rng& rng);
/// Argmax with lowest-index tie-break.
int greedy_action(const Matrix& logits, int row);
/// Log-probability of one action under the row's softmax.
double action_log_prob(const Matrix& logits, int row, int action);

}  // namespace gaplab
