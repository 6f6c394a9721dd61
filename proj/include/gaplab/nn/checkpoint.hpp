#pragma once

#include <string>

#include "gaplab/nn/params.hpp"
#include "gaplab/nn/policy.hpp"

namespace gaplab {

/// Self-describing weight snapshot: the network geometry and the canonical
/// text of the run configuration travel with the tensors, so evaluation can
/// rebuild the exact setup from the file alone.
struct Checkpoint {
  NetConfig net;
  Params params;
  std::string run_config;  // canonical config dump of the producing run
  int update = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Throws on bad magic, unsupported version, or a config-hash mismatch
/// (truncated or tampered file).
Checkpoint load_checkpoint(const std::string& path);

/// Standard file name for a training snapshot: ckpt_<update>.bin.
std::string checkpoint_name(int update);

}  // namespace gaplab
