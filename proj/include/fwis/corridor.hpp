#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "fwis/scenario.hpp"

namespace fwis {

struct DrivingCorridor {
  Point2 center;
  double l_up = 0.0, l_down = 0.0, l_left = 0.0, l_right = 0.0;

  double up() const { return center.y + l_up; }
  double down() const { return center.y - l_down; }
  double left() const { return center.x - l_left; }
  double right() const { return center.x + l_right; }
};

struct CorridorBounds {
  double xmin, xmax, ymin, ymax;
};

// Box constraints E_left <= x <= E_right, E_down <= y <= E_up.
CorridorBounds corridor_constraints(const DrivingCorridor& c);

struct CorridorParams {
  double initial_step = 0.5;
  double max_step = 4.0;
  double min_step = 0.05;
  int max_failures = 3;  // consecutive failed expansions per direction
  double max_total = std::numeric_limits<double>::infinity();  // cap per direction
};

// Static-obstacle environment the boxes are grown against. Obstacles are
// kept as exact polygons; `inflation` is the default body-fitting margin
// added to every clearance test.
struct CorridorEnv {
  Workspace workspace;
  std::vector<ConvexPolygon> blocking;
  double inflation = 0.0;

  static CorridorEnv from_scenario(const Scenario& s, const VehicleParams& params);
  // The box expanded per-axis by the margins must avoid every obstacle and
  // stay inside the workspace.
  bool box_free(double xmin, double ymin, double xmax, double ymax, double margin_x,
                double margin_y) const;
  bool box_free(double xmin, double ymin, double xmax, double ymax) const {
    return box_free(xmin, ymin, xmax, ymax, inflation, inflation);
  }
  bool point_free(const Point2& p) const { return box_free(p.x, p.y, p.x, p.y); }
};

double aabb_polygon_distance(double xmin, double ymin, double xmax, double ymax,
                             const ConvexPolygon& poly);

// Axis margins covering the body at headings within +-band of theta: the
// longitudinal reach projects onto each axis, so a box containing the
// vehicle center keeps the whole footprint clear.
void heading_margins(const VehicleParams& params, double theta, double band, double& margin_x,
                     double& margin_y);

// Adaptive per-direction growth: double the step on success (capped),
// halve on collision, give up a direction after max_failures consecutive
// collisions or once the step drops below min_step. Empty when p itself is
// not free under the margins. Negative margins select env.inflation.
std::optional<DrivingCorridor> expand_corridor(const Point2& p, const CorridorEnv& env,
                                               const CorridorParams& params = {},
                                               double margin_x = -1.0, double margin_y = -1.0);

struct RiskFieldParams {
  double alpha = 1.0;
  double beta = 0.05;        // s/m
  double d_safe = 3.0;       // Mahalanobis units
  double epsilon_threshold = 0.05;
  double delta_l = 0.25;     // shrink step, meters
  int boundary_samples = 9;  // M
  double risk_cap = 1e9;     // returned when the Mahalanobis distance is zero
};

// Constant-acceleration forecast, closed form.
Point2 predict_pedestrian(const PedestrianTrack& t, int k, double dt);
Point2 pedestrian_velocity(const PedestrianTrack& t, int k, double dt);

// Diagonal position covariance after k steps, by the literal summation.
void position_variance(const PedestrianTrack& t, int k, double dt, double& var_x, double& var_y);

// sqrt(r^T D^-1 r) for diagonal D; throws std::domain_error when D is
// singular.
double mahalanobis(const Point2& vehicle, const Point2& ped_mean, double var_x, double var_y);

// Max over pedestrians of the scalar risk magnitude at forecast step k.
// vehicle_vel feeds the closing-speed damping term.
double risk_value(const Point2& vehicle_pos, const Point2& vehicle_vel,
                  const std::vector<PedestrianTrack>& peds, int k, double dt,
                  const RiskFieldParams& params);

// Samples per boundary edge: the configured count floors it, long edges
// get enough extra samples to keep the spacing under half a meter.
int edge_sample_count(double edge_length, const RiskFieldParams& params);

// Repeated per-direction reduction until every boundary sample is at or
// below the threshold (or the direction has collapsed to zero).
DrivingCorridor shrink_corridor(const DrivingCorridor& c, const std::vector<PedestrianTrack>& peds,
                                int k, double dt, const Point2& vehicle_vel,
                                const RiskFieldParams& params);

// Sum over pedestrians of per-pedestrian max-normalized risk accumulated
// over the trajectory samples. Pedestrians with identically zero risk
// contribute nothing.
double cumulative_risk_potential(const std::vector<Point2>& positions,
                                 const std::vector<Point2>& velocities,
                                 const std::vector<PedestrianTrack>& peds, double dt,
                                 const RiskFieldParams& params);

struct CorridorBuildResult {
  std::vector<DrivingCorridor> corridors;  // valid only when ok
  bool ok = false;
  int failed_sample = -1;  // first sample whose box could not be constructed
};

// One corridor per sample point, expanded against statics with
// heading-aware body margins and (optionally) shrunk against pedestrian
// risk. A sample whose margins cannot be satisfied degrades to a
// zero-size pin when its actual footprint is clear; otherwise the build
// fails there. Samples are independent, so the parallel build distributes
// them across threads; results are identical to the serial reference.
CorridorBuildResult build_corridors(const std::vector<Point2>& positions,
                                    const std::vector<Point2>& velocities,
                                    const std::vector<double>& headings,
                                    const std::vector<double>& heading_bands, const Scenario& s,
                                    const VehicleParams& vparams, const CorridorParams& cparams,
                                    const RiskFieldParams& rparams, double dt, bool use_risk);
CorridorBuildResult build_corridors_serial(const std::vector<Point2>& positions,
                                           const std::vector<Point2>& velocities,
                                           const std::vector<double>& headings,
                                           const std::vector<double>& heading_bands,
                                           const Scenario& s, const VehicleParams& vparams,
                                           const CorridorParams& cparams,
                                           const RiskFieldParams& rparams, double dt,
                                           bool use_risk);

}  // namespace fwis
