#include "fwis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fwis/corridor.hpp"

namespace fwis {

JerkMetrics jerk_metrics(const Trajectory& traj) {
  JerkMetrics m;
  if (traj.n < 2) return m;
  const double dt = traj.dt();
  double sum = 0.0;
  for (int k = 0; k + 1 < traj.n; ++k) {
    const double j = std::abs(traj.a[k + 1] - traj.a[k]) / dt;
    m.max_jerk = std::max(m.max_jerk, j);
    sum += j;
  }
  m.avg_jerk = sum / (traj.n - 1);
  return m;
}

PathMetrics path_metrics(const Trajectory& traj) {
  PathMetrics m;
  for (int j = 1; j <= traj.n; ++j) {
    m.length += distance(traj.position(j - 1), traj.position(j));
  }
  m.traversal_time = traj.t_f;
  return m;
}

double min_pedestrian_distance(const Trajectory& traj, const std::vector<PedestrianTrack>& peds) {
  if (peds.empty()) return std::numeric_limits<double>::infinity();
  const double dt = traj.dt();
  double best = std::numeric_limits<double>::infinity();
  for (const PedestrianTrack& t : peds) {
    for (int j = 0; j <= traj.n; ++j) {
      best = std::min(best, distance(traj.position(j), predict_pedestrian(t, j, dt)));
    }
  }
  return best;
}

}  // namespace fwis
