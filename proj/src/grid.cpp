#include "fwis/grid.hpp"

#include <cmath>
#include <limits>
#include <queue>

namespace fwis {

namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
const double kSqrt2 = std::sqrt(2.0);

double octile(int dx, int dy) {
  dx = std::abs(dx);
  dy = std::abs(dy);
  return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
}

struct QueueEntry {
  double f;
  double g;
  uint64_t order;
  int cell;
  bool operator>(const QueueEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g > o.g;
    return order > o.order;
  }
};

}  // namespace

OccupancyGrid make_occupancy(const Scenario& s, const VehicleParams& params, double resolution) {
  OccupancyGrid g;
  g.workspace = s.workspace;
  g.resolution = resolution;
  g.nx = std::max(1, static_cast<int>(std::ceil(s.workspace.width() / resolution)));
  g.ny = std::max(1, static_cast<int>(std::ceil(s.workspace.height() / resolution)));
  g.blocked.assign(static_cast<size_t>(g.nx) * g.ny, 0);

  const std::vector<ConvexPolygon> blocking = s.shapes_of(ObstacleKind::NonTraversable);
  const double inflate = params.width / 2.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const Point2 c = g.cell_center(ix, iy);
      for (const ConvexPolygon& poly : blocking) {
        if (point_polygon_distance(c, poly) <= inflate) {
          g.blocked[static_cast<size_t>(iy) * g.nx + ix] = 1;
          break;
        }
      }
    }
  }
  return g;
}

std::optional<GridPath> astar_grid(const OccupancyGrid& grid, const Point2& start,
                                   const Point2& goal) {
  int sx, sy, gx, gy;
  grid.cell_of(start, sx, sy);
  grid.cell_of(goal, gx, gy);
  if (grid.is_blocked(sx, sy) || grid.is_blocked(gx, gy)) return std::nullopt;

  const size_t n = static_cast<size_t>(grid.nx) * grid.ny;
  std::vector<double> g_cost(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<uint8_t> closed(n, 0);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  const int start_cell = sy * grid.nx + sx;
  const int goal_cell = gy * grid.nx + gx;
  uint64_t counter = 0;
  g_cost[start_cell] = 0.0;
  open.push({octile(gx - sx, gy - sy), 0.0, counter++, start_cell});

  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed[top.cell]) continue;
    closed[top.cell] = 1;
    if (top.cell == goal_cell) break;
    const int cx = top.cell % grid.nx;
    const int cy = top.cell / grid.nx;
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k], ny = cy + kDy[k];
      if (!grid.in_bounds(nx, ny) || grid.is_blocked(nx, ny)) continue;
      const int cell = ny * grid.nx + nx;
      if (closed[cell]) continue;
      const double step = (k < 4) ? 1.0 : kSqrt2;
      const double ng = g_cost[top.cell] + step;
      if (ng < g_cost[cell]) {
        g_cost[cell] = ng;
        parent[cell] = top.cell;
        open.push({ng + octile(gx - nx, gy - ny), ng, counter++, cell});
      }
    }
  }
  if (!closed[goal_cell]) return std::nullopt;

  GridPath path;
  for (int cell = goal_cell; cell != -1; cell = parent[cell]) {
    path.waypoints.push_back(grid.cell_center(cell % grid.nx, cell / grid.nx));
  }
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

std::optional<GridPath> astar_grid(const Scenario& s, const VehicleParams& params,
                                   double resolution) {
  const OccupancyGrid grid = make_occupancy(s, params, resolution);
  return astar_grid(grid, s.init.position(), s.goal.position());
}

std::vector<double> dijkstra_distance_field(const OccupancyGrid& grid, const Point2& goal) {
  const size_t n = static_cast<size_t>(grid.nx) * grid.ny;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  int gx, gy;
  grid.cell_of(goal, gx, gy);
  if (grid.is_blocked(gx, gy)) return dist;

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  uint64_t counter = 0;
  const int goal_cell = gy * grid.nx + gx;
  dist[goal_cell] = 0.0;
  open.push({0.0, 0.0, counter++, goal_cell});
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (top.g > dist[top.cell]) continue;
    const int cx = top.cell % grid.nx;
    const int cy = top.cell / grid.nx;
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k], ny = cy + kDy[k];
      if (!grid.in_bounds(nx, ny) || grid.is_blocked(nx, ny)) continue;
      const int cell = ny * grid.nx + nx;
      const double step = (k < 4) ? 1.0 : kSqrt2;
      const double nd = top.g + step;
      if (nd < dist[cell]) {
        dist[cell] = nd;
        open.push({nd, nd, counter++, cell});
      }
    }
  }
  for (double& d : dist) d *= grid.resolution;
  return dist;
}

}  // namespace fwis
