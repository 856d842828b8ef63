#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fwis/corridor.hpp"
#include "fwis/grid.hpp"
#include "fwis/scenario.hpp"

namespace fwis {

struct GuidedPoint {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // in (-pi, pi]
};

struct KeyPointSet {
  std::vector<GuidedPoint> points;        // Xs, g_1..g_N, Xf
  std::optional<int> gear_shift_index;    // position of the gear-shift point
};

// Greedy chain of prefix-farthest visible waypoints: from each current
// point the scan runs forward until the first occluded waypoint; the goal
// waypoint terminates the chain when reached.
std::vector<Point2> consecutive_farthest_visible(const std::vector<Point2>& waypoints,
                                                 const std::vector<ConvexPolygon>& obstacles);

bool needs_gear_shift(double alpha1, double alpha2);

enum class OrientationCase { Forward, Reverse, ForwardThenReverse, ReverseThenForward };

OrientationCase classify_orientation_case(double alpha1, double alpha2);

// One adaptive rectangle per center, statics only; centers that sit inside
// the inflated obstacle margin get a degenerate zero rectangle.
std::vector<DrivingCorridor> local_rectangles(const std::vector<Point2>& centers,
                                              const CorridorEnv& env,
                                              const CorridorParams& params = {});

struct GearShift {
  GuidedPoint point;
  bool from_fallback = false;  // rectangle center used instead of the curve meet
};

// Gear-shift pose inside the largest rectangle: clothoids grown from the
// two path crossings of its boundary, meeting point refined numerically,
// rectangle center as the fallback.
GearShift gear_shift_point(const DrivingCorridor& rect, const std::vector<Point2>& path,
                           const VehicleParams& params);

// Headings per the four travel cases. gear_index splits forward/reverse
// assignment for the shifting cases; next_after_last substitutes for the
// missing successor of the final center.
std::vector<GuidedPoint> assign_orientations(const std::vector<Point2>& centers, double alpha1,
                                             double alpha2, std::optional<int> gear_index,
                                             const Point2& next_after_last);

// Full pipeline: grid search, visible-point reduction, rectangles,
// optional gear shift, orientations, endpoint poses. Empty when the grid
// search fails.
std::optional<KeyPointSet> generate_guided_points(const Scenario& s, const VehicleParams& params,
                                                  double resolution);

void save_key_points(const KeyPointSet& kps, const std::string& path);

}  // namespace fwis
