#include "fwis/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fwis {

CorridorBounds corridor_constraints(const DrivingCorridor& c) {
  return {c.left(), c.right(), c.down(), c.up()};
}

CorridorEnv CorridorEnv::from_scenario(const Scenario& s, const VehicleParams& params) {
  CorridorEnv env;
  env.workspace = s.workspace;
  env.blocking = s.shapes_of(ObstacleKind::NonTraversable);
  env.inflation = params.width / 2.0 + 0.05;
  return env;
}

void heading_margins(const VehicleParams& params, double theta, double band, double& margin_x,
                     double& margin_y) {
  const double reach_long = params.wheelbase / 2.0 + std::max(params.front_overhang,
                                                              params.rear_overhang);
  const double reach_lat = params.width / 2.0;
  margin_x = 0.0;
  margin_y = 0.0;
  const int steps = 12;
  for (int i = 0; i <= steps; ++i) {
    const double phi = theta - band + 2.0 * band * i / steps;
    const double c = std::abs(std::cos(phi)), s = std::abs(std::sin(phi));
    margin_x = std::max(margin_x, reach_long * c + reach_lat * s);
    margin_y = std::max(margin_y, reach_long * s + reach_lat * c);
  }
  margin_x += 0.05;
  margin_y += 0.05;
}

double aabb_polygon_distance(double xmin, double ymin, double xmax, double ymax,
                             const ConvexPolygon& poly) {
  for (const Point2& v : poly.vertices) {
    if (v.x >= xmin && v.x <= xmax && v.y >= ymin && v.y <= ymax) return 0.0;
  }
  const Point2 corners[4] = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
  for (const Point2& c : corners) {
    if (poly.contains(c)) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.vertices.size();
  for (int e = 0; e < 4; ++e) {
    const Point2& a = corners[e];
    const Point2& b = corners[(e + 1) % 4];
    if (segment_intersects_polygon(a, b, poly)) return 0.0;
    for (size_t i = 0; i < n; ++i) {
      const Point2& p = poly.vertices[i];
      const Point2& q = poly.vertices[(i + 1) % n];
      best = std::min({best, point_segment_distance(a, p, q), point_segment_distance(p, a, b),
                       point_segment_distance(q, a, b), point_segment_distance(b, p, q)});
    }
  }
  return best;
}

bool CorridorEnv::box_free(double xmin, double ymin, double xmax, double ymax, double margin_x,
                           double margin_y) const {
  const double tol = 1e-9;  // keeps exact saturation at the workspace edge
  if (xmin - margin_x < workspace.xmin - tol || ymin - margin_y < workspace.ymin - tol ||
      xmax + margin_x > workspace.xmax + tol || ymax + margin_y > workspace.ymax + tol)
    return false;
  for (const ConvexPolygon& poly : blocking) {
    if (aabb_polygon_distance(xmin - margin_x, ymin - margin_y, xmax + margin_x, ymax + margin_y,
                              poly) <= 0.0)
      return false;
  }
  return true;
}

std::optional<DrivingCorridor> expand_corridor(const Point2& p, const CorridorEnv& env,
                                               const CorridorParams& params, double margin_x,
                                               double margin_y) {
  const double mx = margin_x < 0.0 ? env.inflation : margin_x;
  const double my = margin_y < 0.0 ? env.inflation : margin_y;
  if (!env.box_free(p.x, p.y, p.x, p.y, mx, my)) return std::nullopt;
  DrivingCorridor c;
  c.center = p;
  double* lengths[4] = {&c.l_up, &c.l_right, &c.l_down, &c.l_left};
  const double room[4] = {
      std::min(params.max_total, env.workspace.ymax - my - p.y),
      std::min(params.max_total, env.workspace.xmax - mx - p.x),
      std::min(params.max_total, p.y - my - env.workspace.ymin),
      std::min(params.max_total, p.x - mx - env.workspace.xmin)};
  for (int dir = 0; dir < 4; ++dir) {
    double step = params.initial_step;
    int failures = 0;  // consecutive collisions
    while (failures < params.max_failures && step >= params.min_step) {
      const double saved = *lengths[dir];
      // The workspace edge clips the trial rather than counting as a
      // collision, so free directions saturate exactly at the boundary.
      const double trial = std::min(saved + step, room[dir]);
      if (trial <= saved) break;
      *lengths[dir] = trial;
      if (env.box_free(c.left(), c.down(), c.right(), c.up(), mx, my)) {
        step = std::min(step * 2.0, params.max_step);
        failures = 0;
      } else {
        *lengths[dir] = saved;
        step *= 0.5;
        ++failures;
      }
    }
  }
  return c;
}

Point2 predict_pedestrian(const PedestrianTrack& t, int k, double dt) {
  const double tk = k * dt;
  return {t.x0 + t.vx * tk + 0.5 * t.ax * tk * tk, t.y0 + t.vy * tk + 0.5 * t.ay * tk * tk};
}

Point2 pedestrian_velocity(const PedestrianTrack& t, int k, double dt) {
  const double tk = k * dt;
  return {t.vx + t.ax * tk, t.vy + t.ay * tk};
}

void position_variance(const PedestrianTrack& t, int k, double dt, double& var_x, double& var_y) {
  const double dt2 = dt * dt;
  const double dt4 = dt2 * dt2;
  var_x = t.var_x;
  var_y = t.var_y;
  for (int i = 1; i <= k; ++i) {
    var_x += dt2 * (t.var_vx + t.var_ax * dt2) + t.var_ax * dt4 / 4.0;
    var_y += dt2 * (t.var_vy + t.var_ay * dt2) + t.var_ay * dt4 / 4.0;
  }
}

double mahalanobis(const Point2& vehicle, const Point2& ped_mean, double var_x, double var_y) {
  if (var_x <= 0.0 || var_y <= 0.0) throw std::domain_error("mahalanobis: singular covariance");
  const double rx = vehicle.x - ped_mean.x;
  const double ry = vehicle.y - ped_mean.y;
  return std::sqrt(rx * rx / var_x + ry * ry / var_y);
}

double risk_value(const Point2& vehicle_pos, const Point2& vehicle_vel,
                  const std::vector<PedestrianTrack>& peds, int k, double dt,
                  const RiskFieldParams& params) {
  double worst = 0.0;
  for (const PedestrianTrack& t : peds) {
    const Point2 mean = predict_pedestrian(t, k, dt);
    double var_x, var_y;
    position_variance(t, k, dt, var_x, var_y);
    const double d_m = mahalanobis(vehicle_pos, mean, var_x, var_y);
    if (d_m > params.d_safe) continue;
    if (d_m == 0.0) {
      worst = std::max(worst, params.risk_cap);
      continue;
    }
    // Separation speed along the vehicle-pedestrian line, floored at zero:
    // moving apart damps the risk, closing in keeps it undamped.
    const Point2 away = vehicle_pos - mean;
    const double dist = away.norm();
    double v_r = 0.0;
    if (dist > 1e-12) {
      const Point2 rel = {vehicle_vel.x - pedestrian_velocity(t, k, dt).x,
                          vehicle_vel.y - pedestrian_velocity(t, k, dt).y};
      v_r = std::max(0.0, rel.dot(away) / dist);
    }
    const double gap = 1.0 / d_m - 1.0 / params.d_safe;
    worst = std::max(worst, params.alpha * gap * gap * std::exp(-params.beta * v_r));
  }
  return worst;
}

int edge_sample_count(double edge_length, const RiskFieldParams& params) {
  // The configured count is a floor; long edges add samples so the spacing
  // stays below half a meter and narrow risk bumps cannot slip between
  // sample points.
  const int by_spacing = static_cast<int>(std::ceil(edge_length / 0.5)) + 1;
  return std::max({2, params.boundary_samples, by_spacing});
}

namespace {

double edge_max_risk(const DrivingCorridor& c, int dir, const std::vector<PedestrianTrack>& peds,
                     int k, double dt, const Point2& vehicle_vel, const RiskFieldParams& params) {
  const bool horizontal = dir == 0 || dir == 2;
  const double len = horizontal ? c.right() - c.left() : c.up() - c.down();
  const int m = edge_sample_count(len, params);
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / (m - 1);
    Point2 p;
    switch (dir) {
      case 0: p = {c.left() + t * (c.right() - c.left()), c.up()}; break;
      case 1: p = {c.right(), c.down() + t * (c.up() - c.down())}; break;
      case 2: p = {c.left() + t * (c.right() - c.left()), c.down()}; break;
      default: p = {c.left(), c.down() + t * (c.up() - c.down())}; break;
    }
    worst = std::max(worst, risk_value(p, vehicle_vel, peds, k, dt, params));
  }
  return worst;
}

}  // namespace

DrivingCorridor shrink_corridor(const DrivingCorridor& c, const std::vector<PedestrianTrack>& peds,
                                int k, double dt, const Point2& vehicle_vel,
                                const RiskFieldParams& params) {
  DrivingCorridor out = c;
  if (peds.empty()) return out;
  double* lengths[4] = {&out.l_up, &out.l_right, &out.l_down, &out.l_left};
  // Directions interact through the shared corners, so sweep until a full
  // pass leaves every edge at or below the threshold.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int dir = 0; dir < 4; ++dir) {
      while (*lengths[dir] > 0.0 &&
             edge_max_risk(out, dir, peds, k, dt, vehicle_vel, params) > params.epsilon_threshold) {
        *lengths[dir] = std::max(0.0, *lengths[dir] - params.delta_l);
        changed = true;
      }
    }
  }
  return out;
}

double cumulative_risk_potential(const std::vector<Point2>& positions,
                                 const std::vector<Point2>& velocities,
                                 const std::vector<PedestrianTrack>& peds, double dt,
                                 const RiskFieldParams& params) {
  double crp = 0.0;
  for (const PedestrianTrack& t : peds) {
    std::vector<PedestrianTrack> one{t};
    std::vector<double> u(positions.size());
    double peak = 0.0;
    for (size_t k = 0; k < positions.size(); ++k) {
      const Point2 vel = k < velocities.size() ? velocities[k] : Point2{};
      u[k] = risk_value(positions[k], vel, one, static_cast<int>(k), dt, params);
      peak = std::max(peak, u[k]);
    }
    if (peak <= 0.0) continue;
    for (double v : u) crp += v / peak;
  }
  return crp;
}

namespace {

CorridorBuildResult build_corridors_impl(const std::vector<Point2>& positions,
                                         const std::vector<Point2>& velocities,
                                         const std::vector<double>& headings,
                                         const std::vector<double>& heading_bands,
                                         const Scenario& s,
                                         const VehicleParams& vparams,
                                         const CorridorParams& cparams,
                                         const RiskFieldParams& rparams, double dt, bool use_risk,
                                         bool parallel) {
  for (const PedestrianTrack& t : s.pedestrians) {
    if (t.var_x <= 0.0 || t.var_y <= 0.0)
      throw std::domain_error("build_corridors: pedestrian track with singular covariance");
  }
  const CorridorEnv env = CorridorEnv::from_scenario(s, vparams);
  const std::vector<ConvexPolygon> blocking = s.shapes_of(ObstacleKind::NonTraversable);
  const int n = static_cast<int>(positions.size());
  CorridorBuildResult result;
  result.corridors.resize(n);
  std::vector<uint8_t> ok(n, 0);

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int j = 0; j < n; ++j) {
    const double theta = j < static_cast<int>(headings.size()) ? headings[j] : 0.0;
    const double band =
        j < static_cast<int>(heading_bands.size()) ? heading_bands[j] : M_PI / 18.0;
    double mx, my;
    heading_margins(vparams, theta, band, mx, my);
    // The axis-aligned body margins over-approximate the rotated
    // footprint; where they cannot be met, relax down a ladder of smaller
    // margins. The optimized trajectory is footprint-verified afterwards,
    // so the looser rungs trade guaranteed clearance for solvable slack.
    std::optional<DrivingCorridor> c = expand_corridor(positions[j], env, cparams, mx, my);
    if (!c) c = expand_corridor(positions[j], env, cparams, env.inflation, env.inflation);
    if (!c) c = expand_corridor(positions[j], env, cparams, 0.05, 0.05);
    if (!c) {
      // Last resort: pin the sample to its own pose, which the search
      // already validated.
      VehicleState st;
      st.x = positions[j].x;
      st.y = positions[j].y;
      st.theta = theta;
      const ConvexPolygon fp = vehicle_footprint(st, vparams);
      bool clear = true;
      for (const ConvexPolygon& obs : blocking) {
        if (polygons_intersect(fp, obs)) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      DrivingCorridor pin;
      pin.center = positions[j];
      c = pin;
    }
    if (use_risk && !s.pedestrians.empty()) {
      const Point2 vel = j < static_cast<int>(velocities.size()) ? velocities[j] : Point2{};
      *c = shrink_corridor(*c, s.pedestrians, j, dt, vel, rparams);
      // A direction that collapsed to zero with risk still above the
      // threshold means the sample itself is unavoidably unsafe; the build
      // reports failure rather than emitting an unsafe box.
      bool residual = false;
      for (int dir = 0; dir < 4 && !residual; ++dir) {
        if (edge_max_risk(*c, dir, s.pedestrians, j, dt, vel, rparams) >
            rparams.epsilon_threshold)
          residual = true;
      }
      if (residual) continue;
    }
    result.corridors[j] = *c;
    ok[j] = 1;
  }
  for (int j = 0; j < n; ++j) {
    if (!ok[j]) {
      result.failed_sample = j;
      return result;
    }
  }
  result.ok = true;
  return result;
}

}  // namespace

CorridorBuildResult build_corridors(const std::vector<Point2>& positions,
                                    const std::vector<Point2>& velocities,
                                    const std::vector<double>& headings,
                                    const std::vector<double>& heading_bands, const Scenario& s,
                                    const VehicleParams& vparams, const CorridorParams& cparams,
                                    const RiskFieldParams& rparams, double dt, bool use_risk) {
  return build_corridors_impl(positions, velocities, headings, heading_bands, s, vparams, cparams,
                              rparams, dt, use_risk, true);
}

CorridorBuildResult build_corridors_serial(const std::vector<Point2>& positions,
                                           const std::vector<Point2>& velocities,
                                           const std::vector<double>& headings,
                                           const std::vector<double>& heading_bands,
                                           const Scenario& s, const VehicleParams& vparams,
                                           const CorridorParams& cparams,
                                           const RiskFieldParams& rparams, double dt,
                                           bool use_risk) {
  return build_corridors_impl(positions, velocities, headings, heading_bands, s, vparams, cparams,
                              rparams, dt, use_risk, false);
}

}  // namespace fwis
