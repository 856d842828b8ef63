#include "fwis/guided_points.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fwis {

std::vector<Point2> consecutive_farthest_visible(const std::vector<Point2>& waypoints,
                                                 const std::vector<ConvexPolygon>& obstacles) {
  const int n = static_cast<int>(waypoints.size());
  if (n == 0) return {};
  std::vector<Point2> v;
  v.push_back(waypoints[0]);
  if (n == 1) return v;

  int k = 0;
  while (true) {
    const Point2& pf = v.back();
    bool done = false;
    bool advanced = false;
    for (int j = k + 1; j < n; ++j) {
      if (j == n - 1) {
        // The goal waypoint terminates the chain as soon as the scan
        // reaches it.
        v.push_back(waypoints[j]);
        done = true;
        break;
      }
      if (is_visible(pf, waypoints[j], obstacles)) continue;
      v.push_back(waypoints[j - 1]);
      k = j - 1;
      advanced = true;
      break;
    }
    if (done) break;
    if (!advanced) break;  // unreachable for adjacency-connected paths
  }
  return v;
}

namespace {

// Right-angle entries sit exactly on the case boundary; snap the cosine so
// they classify as gear-shifting.
double snapped_cos(double a) {
  const double c = std::cos(a);
  return std::abs(c) < 1e-9 ? 0.0 : c;
}

}  // namespace

bool needs_gear_shift(double alpha1, double alpha2) {
  return snapped_cos(alpha1) * snapped_cos(alpha2) <= 0.0;
}

OrientationCase classify_orientation_case(double alpha1, double alpha2) {
  const double c1 = snapped_cos(alpha1), c2 = snapped_cos(alpha2);
  if (c1 > 0.0 && c2 > 0.0) return OrientationCase::Forward;
  if (c1 < 0.0 && c2 < 0.0) return OrientationCase::Reverse;
  if (c1 >= 0.0 && c2 <= 0.0) return OrientationCase::ForwardThenReverse;
  return OrientationCase::ReverseThenForward;
}

std::vector<DrivingCorridor> local_rectangles(const std::vector<Point2>& centers,
                                              const CorridorEnv& env,
                                              const CorridorParams& params) {
  // Rectangles stay local to their seed point: unbounded growth in open
  // space would pull the rectangle centers (the guided points) far off the
  // route.
  CorridorParams capped = params;
  capped.max_total = std::min(capped.max_total, 4.0);
  std::vector<DrivingCorridor> out;
  out.reserve(centers.size());
  for (const Point2& c : centers) {
    std::optional<DrivingCorridor> rect = expand_corridor(c, env, capped);
    if (rect) {
      out.push_back(*rect);
    } else {
      DrivingCorridor degenerate;
      degenerate.center = c;
      out.push_back(degenerate);
    }
  }
  return out;
}

namespace {

double rect_area(const DrivingCorridor& c) {
  return (c.l_left + c.l_right) * (c.l_up + c.l_down);
}

bool inside_rect(const DrivingCorridor& r, const Point2& p) {
  return p.x >= r.left() && p.x <= r.right() && p.y >= r.down() && p.y <= r.up();
}

// Crossings of the polyline with the rectangle boundary, each annotated
// with the local path heading.
std::vector<Pose2> boundary_crossings(const DrivingCorridor& rect, const std::vector<Point2>& path) {
  std::vector<Pose2> crossings;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const bool a_in = inside_rect(rect, path[i]);
    const bool b_in = inside_rect(rect, path[i + 1]);
    if (a_in == b_in) continue;
    // Bisect the segment for the boundary point.
    Point2 lo = path[i], hi = path[i + 1];
    for (int it = 0; it < 50; ++it) {
      const Point2 mid{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
      if (inside_rect(rect, mid) == a_in)
        lo = mid;
      else
        hi = mid;
    }
    const double heading = std::atan2(path[i + 1].y - path[i].y, path[i + 1].x - path[i].x);
    crossings.push_back({0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y), heading});
  }
  return crossings;
}

}  // namespace

GearShift gear_shift_point(const DrivingCorridor& rect, const std::vector<Point2>& path,
                           const VehicleParams& params) {
  GearShift out;
  std::vector<Pose2> crossings = boundary_crossings(rect, path);
  // Path endpoints lying inside the rectangle stand in for the missing
  // boundary crossings.
  if (path.size() >= 2) {
    if (inside_rect(rect, path.front())) {
      const double h = std::atan2(path[1].y - path[0].y, path[1].x - path[0].x);
      crossings.insert(crossings.begin(), {path.front().x, path.front().y, h});
    }
    if (inside_rect(rect, path.back())) {
      const size_t n = path.size();
      const double h =
          std::atan2(path[n - 1].y - path[n - 2].y, path[n - 1].x - path[n - 2].x);
      crossings.push_back({path.back().x, path.back().y, h});
    }
  }
  if (crossings.size() < 2) {
    out.point = {rect.center.x, rect.center.y,
                 crossings.empty() ? 0.0 : crossings.front().theta};
    out.from_fallback = true;
    return out;
  }
  const Pose2& entry = crossings.front();
  const Pose2& exit = crossings.back();
  const std::optional<ClothoidMeet> meet =
      clothoid_intersection(entry, exit, params.min_turn_radius());
  if (meet && inside_rect(rect, meet->point)) {
    out.point = {meet->point.x, meet->point.y, normalize_angle(meet->tangent)};
    return out;
  }
  out.point = {rect.center.x, rect.center.y, entry.theta};
  out.from_fallback = true;
  return out;
}

std::vector<GuidedPoint> assign_orientations(const std::vector<Point2>& centers, double alpha1,
                                             double alpha2, std::optional<int> gear_index,
                                             const Point2& next_after_last) {
  const OrientationCase oc = classify_orientation_case(alpha1, alpha2);
  std::vector<GuidedPoint> out;
  out.reserve(centers.size());
  double prev_theta = 0.0;
  for (size_t i = 0; i < centers.size(); ++i) {
    const Point2& cur = centers[i];
    const Point2& next = (i + 1 < centers.size()) ? centers[i + 1] : next_after_last;
    const bool degenerate = distance(cur, next) < 1e-12;
    const double forward = degenerate ? prev_theta : std::atan2(next.y - cur.y, next.x - cur.x);
    const double reverse = degenerate ? prev_theta : std::atan2(cur.y - next.y, cur.x - next.x);
    double theta;
    switch (oc) {
      case OrientationCase::Forward: theta = forward; break;
      case OrientationCase::Reverse: theta = reverse; break;
      case OrientationCase::ForwardThenReverse:
        theta = (gear_index && static_cast<int>(i) <= *gear_index) ? forward : reverse;
        break;
      case OrientationCase::ReverseThenForward:
      default:
        theta = (gear_index && static_cast<int>(i) <= *gear_index) ? reverse : forward;
        break;
    }
    theta = normalize_angle(theta);
    out.push_back({cur.x, cur.y, theta});
    prev_theta = theta;
  }
  return out;
}

namespace {

bool footprint_blocked(const GuidedPoint& g, const Scenario& s, const VehicleParams& params) {
  VehicleState st;
  st.x = g.x;
  st.y = g.y;
  st.theta = g.theta;
  const ConvexPolygon fp = vehicle_footprint(st, params);
  for (const StaticObstacle& o : s.statics) {
    if (o.attribute.kind != ObstacleKind::NonTraversable) continue;
    if (polygons_intersect(fp, o.shape)) return true;
  }
  return false;
}

// Collision snap: nearest free cell center inside the rectangle, original
// point kept when none qualifies.
void snap_to_free(GuidedPoint& g, const DrivingCorridor& rect, const Scenario& s,
                  const VehicleParams& params, const OccupancyGrid& grid) {
  if (!footprint_blocked(g, s, params)) return;
  struct Candidate {
    double d;
    Point2 p;
  };
  std::vector<Candidate> cells;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      if (grid.is_blocked(ix, iy)) continue;
      const Point2 c = grid.cell_center(ix, iy);
      if (!inside_rect(rect, c)) continue;
      cells.push_back({distance(c, {g.x, g.y}), c});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.p.x != b.p.x) return a.p.x < b.p.x;
    return a.p.y < b.p.y;
  });
  for (const Candidate& c : cells) {
    GuidedPoint moved{c.p.x, c.p.y, g.theta};
    if (!footprint_blocked(moved, s, params)) {
      g = moved;
      return;
    }
  }
}

}  // namespace

std::optional<KeyPointSet> generate_guided_points(const Scenario& s, const VehicleParams& params,
                                                  double resolution) {
  const OccupancyGrid grid = make_occupancy(s, params, resolution);
  const std::optional<GridPath> path = astar_grid(grid, s.init.position(), s.goal.position());
  if (!path) return std::nullopt;

  const std::vector<ConvexPolygon> blocking = s.shapes_of(ObstacleKind::NonTraversable);
  const std::vector<Point2> visible = consecutive_farthest_visible(path->waypoints, blocking);

  // Entry/exit angles are measured against the first and last reduced
  // segments.
  double alpha1 = 0.0, alpha2 = 0.0;
  if (visible.size() >= 2) {
    const double dir_first =
        std::atan2(visible[1].y - visible[0].y, visible[1].x - visible[0].x);
    const size_t m = visible.size();
    const double dir_last =
        std::atan2(visible[m - 1].y - visible[m - 2].y, visible[m - 1].x - visible[m - 2].x);
    alpha1 = std::abs(angle_diff(s.init.theta, dir_first));
    alpha2 = std::abs(angle_diff(s.goal.theta, dir_last));
  }

  CorridorEnv env = CorridorEnv::from_scenario(s, params);
  const std::vector<DrivingCorridor> rects = local_rectangles(visible, env);

  std::vector<Point2> centers;
  centers.reserve(rects.size());
  for (const DrivingCorridor& r : rects) {
    centers.push_back({0.5 * (r.left() + r.right()), 0.5 * (r.down() + r.up())});
  }

  std::optional<int> gear_index;
  std::optional<GuidedPoint> gear_point;
  if (needs_gear_shift(alpha1, alpha2) && !rects.empty()) {
    size_t best = 0;
    for (size_t i = 1; i < rects.size(); ++i) {
      if (rect_area(rects[i]) > rect_area(rects[best])) best = i;
    }
    const GearShift gs = gear_shift_point(rects[best], path->waypoints, params);
    gear_point = gs.point;
    gear_index = static_cast<int>(best) + 1;
    centers.insert(centers.begin() + *gear_index, {gs.point.x, gs.point.y});
  }

  std::vector<GuidedPoint> guided =
      assign_orientations(centers, alpha1, alpha2, gear_index, s.goal.position());
  if (gear_index) guided[*gear_index].theta = gear_point->theta;  // incoming clothoid tangent

  for (size_t i = 0; i < guided.size(); ++i) {
    // The gear point has no rectangle of its own; snap within the source
    // rectangle for the others.
    size_t rect_idx = i;
    if (gear_index) {
      if (static_cast<int>(i) == *gear_index) continue;
      if (static_cast<int>(i) > *gear_index) rect_idx = i - 1;
    }
    snap_to_free(guided[i], rects[rect_idx], s, params, grid);
  }

  KeyPointSet kps;
  kps.points.push_back({s.init.x, s.init.y, normalize_angle(s.init.theta)});
  for (const GuidedPoint& g : guided) kps.points.push_back(g);
  kps.points.push_back({s.goal.x, s.goal.y, normalize_angle(s.goal.theta)});
  if (gear_index) kps.gear_shift_index = *gear_index + 1;
  return kps;
}

void save_key_points(const KeyPointSet& kps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_key_points: cannot open " + path);
  out << "fwis-keypoints 1\n";
  out << "count " << kps.points.size() << "\n";
  out << "gearshift " << (kps.gear_shift_index ? *kps.gear_shift_index : -1) << "\n";
  char buf[128];
  for (const GuidedPoint& g : kps.points) {
    std::snprintf(buf, sizeof(buf), "q %.17g %.17g %.17g\n", g.x, g.y, g.theta);
    out << buf;
  }
}

}  // namespace fwis
