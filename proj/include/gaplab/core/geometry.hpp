#pragma once

#include <utility>
#include <vector>

#include "gaplab/core/types.hpp"

namespace gaplab {

/// Oriented-rectangle intersection via the separating axis test. Boundary
/// contact counts as overlap. Throws on non-finite poses or non-positive
/// extents.
bool boxes_overlap(const AgentState& a, const AgentState& b);

struct PolylineDistance {
  double distance = 0.0;
  int segment_index = 0;  // ties broken toward the lower index
};

/// Minimum distance from a point to a polyline (exact point-to-segment).
PolylineDistance point_to_polyline_distance(double px, double py, const Polyline& line);

/// Corridor model: offroad iff the lateral distance to the nearest
/// lane-center polyline exceeds that polyline's half-width. Throws when the
/// roadgraph has no lane-center polyline.
bool is_offroad(const AgentState& state, const std::vector<Polyline>& roadgraph);

/// Per-step deviation between simulated and logged pose: Euclidean (x, y)
/// distance, yaw excluded.
double log_divergence(const Pose2D& sim, const Pose2D& logged);

/// Resample every polyline at the given spacing (keeping vertices' kinds) for
/// observation features. Spacing must be > 0.
std::vector<RoadPoint> sample_roadgraph(const std::vector<Polyline>& roadgraph, double spacing);

/// Evaluate safety metrics of agent `ego_index` against the rest of the scene
/// and a logged reference pose. Agents flagged invalid cannot overlap.
StepMetrics step_metrics(const std::vector<AgentState>& agents, int ego_index,
                         const std::vector<Polyline>& roadgraph, const Pose2D& logged_ego);

/// Rigid transform helpers for property tests and the generator.
Pose2D transform_pose(const Pose2D& p, double rot, double tx, double ty);
AgentState transform_state(const AgentState& s, double rot, double tx, double ty);
Polyline transform_polyline(const Polyline& line, double rot, double tx, double ty);

}  // namespace gaplab
