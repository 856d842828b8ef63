#pragma once

#include <optional>
#include <vector>

#include "fwis/scenario.hpp"

namespace fwis {

// Coarse occupancy over the workspace. Cells are blocked when their center
// lies within the inflation radius of a NonTraversable obstacle; crossable
// and drive-over obstacles stay free at this level.
struct OccupancyGrid {
  Workspace workspace;
  double resolution = 0.5;
  int nx = 0, ny = 0;
  std::vector<uint8_t> blocked;

  bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
  bool is_blocked(int ix, int iy) const { return blocked[static_cast<size_t>(iy) * nx + ix] != 0; }
  Point2 cell_center(int ix, int iy) const {
    return {workspace.xmin + (ix + 0.5) * resolution, workspace.ymin + (iy + 0.5) * resolution};
  }
  void cell_of(const Point2& p, int& ix, int& iy) const {
    ix = static_cast<int>((p.x - workspace.xmin) / resolution);
    iy = static_cast<int>((p.y - workspace.ymin) / resolution);
    ix = std::min(std::max(ix, 0), nx - 1);
    iy = std::min(std::max(iy, 0), ny - 1);
  }
};

OccupancyGrid make_occupancy(const Scenario& s, const VehicleParams& params, double resolution);

struct GridPath {
  std::vector<Point2> waypoints;  // cell centers

  double length() const {
    double l = 0.0;
    for (size_t i = 1; i < waypoints.size(); ++i) l += distance(waypoints[i - 1], waypoints[i]);
    return l;
  }
};

// Shortest 8-connected path between the cells containing start and goal,
// octile heuristic, deterministic tie-breaking. Empty when either endpoint
// cell is blocked or no path exists.
std::optional<GridPath> astar_grid(const OccupancyGrid& grid, const Point2& start,
                                   const Point2& goal);

std::optional<GridPath> astar_grid(const Scenario& s, const VehicleParams& params,
                                   double resolution);

// Metric distance-to-goal for every cell (infinity when unreachable).
std::vector<double> dijkstra_distance_field(const OccupancyGrid& grid, const Point2& goal);

}  // namespace fwis
