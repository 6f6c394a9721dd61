#pragma once

#include <string>
#include <vector>

#include "gaplab/driving/scenario.hpp"

namespace gaplab {

/// True when the ego's swept 2D path crosses another agent's swept path:
/// some ego box at timestep i overlaps some other-agent box at timestep j,
/// for any pair (i, j). Invalid states take no part.
bool scenario_interactive(const Scenario& s);

/// Mean ego speed over the trajectory, computed as per-step displacement
/// over dt, averaged across consecutive valid state pairs.
double ego_mean_speed(const Scenario& s);

/// Order-preserving in-memory filters.
std::vector<Scenario> filter_interactive(const std::vector<Scenario>& in);
std::vector<Scenario> filter_speed(const std::vector<Scenario>& in,
                                   double min_mean_speed = 0.7);

struct FilterReport {
  long long read = 0;
  long long kept = 0;
  long long dropped_noninteractive = 0;
  long long dropped_slow = 0;
  long long malformed = 0;

  bool operator==(const FilterReport&) const = default;
};

/// Stream a corpus file through both filters (interactivity first), writing
/// survivors in input order. Malformed lines are counted and skipped.
FilterReport filter_corpus(const std::string& in_path, const std::string& out_path,
                           bool require_interactive = true, double min_mean_speed = 0.7);

}  // namespace gaplab
