#pragma once

#include "gaplab/core/types.hpp"

namespace gaplab {

/// Apply a delta action: pose moves by (dx, dy, dtheta), yaw renormalized,
/// velocity becomes the realized displacement rate (dx/dt, dy/dt). Size and z
/// fields pass through. Throws on non-finite input or dt <= 0.
AgentState step_delta(const AgentState& state, const DeltaAction& action, double dt);

/// Recover the action that moves prev onto next in one step. Throws on
/// invalid states or dt <= 0.
DeltaAction inverse_kinematics(const AgentState& prev, const AgentState& next, double dt);

/// Rotate a world-frame delta into the frame of a heading (and back).
DeltaAction delta_world_to_local(const DeltaAction& world, double yaw);
DeltaAction delta_local_to_world(const DeltaAction& local, double yaw);

}  // namespace gaplab
