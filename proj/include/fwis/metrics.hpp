#pragma once

#include "fwis/ocp.hpp"
#include "fwis/scenario.hpp"

namespace fwis {

struct JerkMetrics {
  double max_jerk = 0.0;
  double avg_jerk = 0.0;
};

// |a(k+1) - a(k)| / dt over consecutive control intervals.
JerkMetrics jerk_metrics(const Trajectory& traj);

struct PathMetrics {
  double length = 0.0;
  double traversal_time = 0.0;
};

PathMetrics path_metrics(const Trajectory& traj);

// Closest Euclidean approach to any pedestrian forecast mean, matching
// sample index to forecast step.
double min_pedestrian_distance(const Trajectory& traj, const std::vector<PedestrianTrack>& peds);

}  // namespace fwis
