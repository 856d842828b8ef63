#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace fwis {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point2& o) const { return x * o.x + y * o.y; }
  double cross(const Point2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  Point2 position() const { return {x, y}; }
};

// Full planner state: pose plus velocity and front-wheel steering angle.
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double theta = 0.0;
  double delta = 0.0;
  Point2 position() const { return {x, y}; }
  Pose2 pose() const { return {x, y, theta}; }
};

// Wraps into (-pi, pi].
double normalize_angle(double a);
// Signed smallest difference a - b, wrapped into (-pi, pi].
double angle_diff(double a, double b);

struct ConvexPolygon {
  std::vector<Point2> vertices;  // counterclockwise, strictly convex

  bool valid() const;
  double area() const;
  Point2 centroid() const;
  // Closed region: boundary points count as contained.
  bool contains(const Point2& p) const;
  void bounds(double& xmin, double& ymin, double& xmax, double& ymax) const;
};

struct VehicleParams {
  double wheelbase = 2.8;
  double front_overhang = 0.929;
  double rear_overhang = 1.942;
  double width = 0.96;
  double ground_clearance = 0.18;
  double max_steer = 0.55;  // rad
  double yaw_rate = 0.5;    // rad/s, constant zero-turn rate

  double body_length() const { return wheelbase + front_overhang + rear_overhang; }
  double min_turn_radius() const { return wheelbase / (2.0 * std::tan(max_steer)); }
  // Wheel lateral spacing; no separate track figure is available, so the
  // body width is used.
  double track() const { return width; }
  double circumscribed_radius() const { return std::hypot(body_length() / 2.0, width / 2.0); }
};

// Closed segment [a,b] against the closed polygon region. Tangential
// grazing counts as an intersection.
bool segment_intersects_polygon(const Point2& a, const Point2& b, const ConvexPolygon& poly);

bool is_visible(const Point2& a, const Point2& b, const std::vector<ConvexPolygon>& obstacles);

bool polygons_intersect(const ConvexPolygon& a, const ConvexPolygon& b);

// 0 when the polygons overlap, else the minimum separation.
double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b);

double point_polygon_distance(const Point2& p, const ConvexPolygon& poly);

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

// Clothoid with curvature ramping linearly from 0 to 1/r_min over
// total_length, evaluated at arc length l. curvature_sign selects the
// turn side, direction = -1 traces the curve in reverse travel.
Point2 clothoid_point_ex(const Pose2& start, double r_min, double l, double total_length,
                         double curvature_sign, double direction);
double clothoid_heading(const Pose2& start, double r_min, double l, double total_length,
                        double curvature_sign, double direction);

// Default quarter-turn clothoid (total length pi/2 * r_min, left turn,
// forward travel). Throws std::domain_error for l < 0.
Point2 clothoid_point(const Pose2& start, double r_min, double l);

double default_clothoid_length(double r_min);

struct ClothoidMeet {
  Point2 point;
  double tangent;  // heading of the first curve at the meeting point
};

// Meeting point of the clothoids grown from the two poses, found by a
// coarse sweep plus alternating 1-D refinement over the candidate
// side/direction combinations in a fixed order. Empty when no pair of
// curves approaches closer than meet_tol.
std::optional<ClothoidMeet> clothoid_intersection(const Pose2& pose1, const Pose2& pose2,
                                                  double r_min, double meet_tol = 1e-3);

ConvexPolygon vehicle_footprint(const VehicleState& state, const VehicleParams& params);

std::array<Point2, 4> wheel_positions(const VehicleState& state, const VehicleParams& params);

}  // namespace fwis
