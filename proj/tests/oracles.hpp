#pragma once

// Independent reference implementations used only by tests. Each oracle is
// written directly from the governing equations or from a separately
// derived formulation, not by calling the library code it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fwis/geometry.hpp"
#include "fwis/planner.hpp"

namespace oracle {

using fwis::Point2;
using fwis::Pose2;
using fwis::VehicleState;

// ---------------------------------------------------------------------------
// Fixed-step Euler integration of the three kinematic modes.

inline VehicleState euler_kinematics(const VehicleState& from, fwis::MotionMode mode,
                                     double direction, double steer, double amount,
                                     const fwis::VehicleParams& params, double h = 1e-4) {
  double duration, v = 0.0;
  switch (mode) {
    case fwis::MotionMode::Ackermann:
    case fwis::MotionMode::Diagonal:
      duration = amount / 1.0;
      v = direction * 1.0;
      break;
    default: duration = amount / params.yaw_rate; break;
  }
  const int n = static_cast<int>(std::ceil(duration / h));
  const double step = duration / n;
  double x = from.x, y = from.y, theta = from.theta;
  for (int i = 0; i < n; ++i) {
    switch (mode) {
      case fwis::MotionMode::Ackermann:
        x += step * v * std::cos(theta);
        y += step * v * std::sin(theta);
        theta += step * 2.0 * v * std::tan(steer) / params.wheelbase;
        break;
      case fwis::MotionMode::Diagonal:
        x += step * v * std::cos(theta + steer);
        y += step * v * std::sin(theta + steer);
        break;
      default: theta += step * direction * params.yaw_rate; break;
    }
  }
  VehicleState out;
  out.x = x;
  out.y = y;
  out.theta = fwis::normalize_angle(theta);
  out.v = mode == fwis::MotionMode::ZeroTurn ? 0.0 : v;
  out.delta = mode == fwis::MotionMode::ZeroTurn ? from.delta : steer;
  return out;
}

// ---------------------------------------------------------------------------
// Clothoid positions by RK4 on the heading ODE theta'(s) = sign * s/(R*L).

inline Point2 clothoid_rk4(const Pose2& start, double r_min, double l, double total_length,
                           double sign = 1.0, double direction = 1.0, int steps = 4000) {
  const double c = sign / (r_min * total_length);
  double x = start.x, y = start.y;
  const double h = l / std::max(1, steps);
  for (int i = 0; i < steps && l > 0.0; ++i) {
    const double s0 = i * h;
    const auto theta_at = [&](double s) { return start.theta + 0.5 * c * s * s; };
    const double k1x = std::cos(theta_at(s0)), k1y = std::sin(theta_at(s0));
    const double k2x = std::cos(theta_at(s0 + 0.5 * h)), k2y = std::sin(theta_at(s0 + 0.5 * h));
    const double k4x = std::cos(theta_at(s0 + h)), k4y = std::sin(theta_at(s0 + h));
    x += direction * h / 6.0 * (k1x + 4.0 * k2x + k4x);
    y += direction * h / 6.0 * (k1y + 4.0 * k2y + k4y);
  }
  return {x, y};
}

// ---------------------------------------------------------------------------
// Reeds-Shepp length by the 48-word enumeration in the classic formulation
// (transcribed formulas; an independent lineage from the segment-typed
// implementation in the library).

namespace rs48 {

inline double mod2pi(double a) {
  while (a < 0.0) a += 2.0 * M_PI;
  while (a >= 2.0 * M_PI) a -= 2.0 * M_PI;
  return a;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-12;

inline double c_c_c(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x - rs, b = y + rc;
  if (std::abs(a) < kEps && std::abs(b) < kEps) return kInf;
  const double u1 = std::hypot(a, b);
  if (u1 > 4.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double alpha = std::acos(u1 / (4.0 * R));
  const double t = mod2pi(M_PI_2 + alpha + theta);
  const double u = mod2pi(M_PI - 2.0 * alpha);
  const double v = mod2pi(phi - t - u);
  return R * (t + u + v);
}

inline double c_cc(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x - rs, b = y + rc;
  if (std::abs(a) < kEps && std::abs(b) < kEps) return kInf;
  const double u1 = std::hypot(a, b);
  if (u1 > 4.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double alpha = std::acos(u1 / (4.0 * R));
  const double t = mod2pi(M_PI_2 + alpha + theta);
  const double u = mod2pi(M_PI - 2.0 * alpha);
  const double v = mod2pi(t + u - phi);
  return R * (t + u + v);
}

inline double csca(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x - rs, b = y + rc;
  const double t = mod2pi(std::atan2(b, a));
  const double u = std::hypot(a, b);
  const double v = mod2pi(phi - t);
  return R * (t + v) + u;
}

inline double cscb(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x + rs, b = y - rc;
  const double u1 = std::hypot(a, b);
  if (u1 < 2.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double u = std::sqrt(u1 * u1 - 4.0 * R * R);
  const double alpha = std::atan2(2.0 * R, u);
  const double t = mod2pi(theta + alpha);
  const double v = mod2pi(t - phi);
  return R * (t + v) + u;
}

inline double ccu_cuc(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x + rs, b = y - rc;
  if (std::abs(a) < kEps && std::abs(b) < kEps) return kInf;
  const double u1 = std::hypot(a, b);
  if (u1 > 4.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  double t, u, v;
  if (u1 > 2.0 * R) {
    const double alpha = std::acos((u1 / 2.0 - R) / (2.0 * R));
    t = mod2pi(M_PI_2 + theta - alpha);
    u = mod2pi(M_PI - alpha);
    v = mod2pi(phi - t + 2.0 * u);
  } else {
    const double alpha = std::acos((u1 / 2.0 + R) / (2.0 * R));
    t = mod2pi(M_PI_2 + theta + alpha);
    u = mod2pi(alpha);
    v = mod2pi(phi - t + 2.0 * u);
  }
  return R * (2.0 * u + t + v);
}

inline double c_cucu_c(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x + rs, b = y - rc;
  if (std::abs(a) < kEps && std::abs(b) < kEps) return kInf;
  const double u1 = std::hypot(a, b);
  if (u1 > 6.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double va1 = (5.0 * R * R - u1 * u1 / 4.0) / (4.0 * R * R);
  if (va1 < 0.0 || va1 > 1.0) return kInf;
  const double u = std::acos(va1);
  const double va2 = std::sin(u);
  const double alpha = std::asin(2.0 * R * va2 / u1);
  const double t = mod2pi(M_PI_2 + theta + alpha);
  const double v = mod2pi(t - phi);
  return R * (2.0 * u + t + v);
}

inline double c_c2sca(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x - rs, b = y + rc;
  const double u1 = std::hypot(a, b);
  if (u1 < 2.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double u = std::sqrt(u1 * u1 - 4.0 * R * R) - 2.0 * R;
  if (u < 0.0) return kInf;
  const double alpha = std::atan2(2.0 * R, u + 2.0 * R);
  const double t = mod2pi(M_PI_2 + theta + alpha);
  const double v = mod2pi(t + M_PI_2 - phi);
  return R * (t + M_PI_2 + v) + u;
}

inline double c_c2scb(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x + rs, b = y - rc;
  const double u1 = std::hypot(a, b);
  if (u1 < 2.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double t = mod2pi(M_PI_2 + theta);
  const double u = u1 - 2.0 * R;
  const double v = mod2pi(phi - t - M_PI_2);
  return R * (t + M_PI_2 + v) + u;
}

inline double c_c2sc2_c(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x + rs, b = y - rc;
  const double u1 = std::hypot(a, b);
  if (u1 < 4.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double u = std::sqrt(u1 * u1 - 4.0 * R * R) - 4.0 * R;
  if (u < 0.0) return kInf;
  const double alpha = std::atan2(2.0 * R, u + 4.0 * R);
  const double t = mod2pi(M_PI_2 + theta + alpha);
  const double v = mod2pi(t - phi);
  return R * (t + M_PI + v) + u;
}

inline double cc_c(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x - rs, b = y + rc;
  if (std::abs(a) < kEps && std::abs(b) < kEps) return kInf;
  const double u1 = std::hypot(a, b);
  if (u1 > 4.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double u = std::acos((8.0 * R * R - u1 * u1) / (8.0 * R * R));
  double va = std::sin(u);
  if (std::abs(va) < 0.001) va = 0.0;
  if (std::abs(va) < 0.001 && std::abs(u1) < 0.001) return kInf;
  const double ratio = 2.0 * R * va / u1;
  if (ratio < -1.0 || ratio > 1.0) return kInf;
  const double alpha = std::asin(ratio);
  const double t = mod2pi(M_PI_2 - alpha + theta);
  const double v = mod2pi(t - u - phi);
  return R * (t + u + v);
}

inline double csc2_ca(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x - rs, b = y + rc;
  const double u1 = std::hypot(a, b);
  if (u1 < 2.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double u = std::sqrt(u1 * u1 - 4.0 * R * R) - 2.0 * R;
  if (u < 0.0) return kInf;
  const double alpha = std::atan2(u + 2.0 * R, 2.0 * R);
  const double t = mod2pi(M_PI_2 + theta - alpha);
  const double v = mod2pi(t - M_PI_2 - phi);
  return R * (t + M_PI_2 + v) + u;
}

inline double csc2_cb(double x, double y, double phi, double rs, double rc, double R) {
  const double a = x + rs, b = y - rc;
  const double u1 = std::hypot(a, b);
  if (u1 < 2.0 * R) return kInf;
  const double theta = std::atan2(b, a);
  const double t = mod2pi(theta);
  const double u = u1 - 2.0 * R;
  const double v = mod2pi(-t - M_PI_2 + phi);
  return R * (t + M_PI_2 + v) + u;
}

inline double shortest_length(const Pose2& from, const Pose2& to, double R) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double theta = std::atan2(dy, dx);
  const double alpha = theta - from.theta;
  const double d = std::hypot(dx, dy);
  const double x = std::cos(alpha) * d;
  const double y = std::sin(alpha) * d;
  const double phi = to.theta - from.theta;

  using Fn = double (*)(double, double, double, double, double, double);
  const Fn fns[12] = {c_c_c, c_cc, csca, cscb,   ccu_cuc, c_cucu_c,
                      c_c2sca, c_c2scb, c_c2sc2_c, cc_c, csc2_ca, csc2_cb};
  const bool big_rc[12] = {false, false, false, true, true, true,
                           false, true,  true,  false, false, true};

  double best = kInf;
  for (int f = 0; f < 12; ++f) {
    const double args[4][3] = {
        {x, y, phi}, {-x, y, -phi}, {x, -y, -phi}, {-x, -y, phi}};
    for (const auto& arg : args) {
      const double p = arg[2];
      const double rs = R * std::sin(p);
      const double rc = big_rc[f] ? R * (std::cos(p) + 1.0) : R * (std::cos(p) - 1.0);
      const double len = fns[f](arg[0], arg[1], p, rs, rc, R);
      if (len >= 0.0) best = std::min(best, len);
    }
  }
  return best;
}

}  // namespace rs48

// ---------------------------------------------------------------------------
// Exhaustive prefix-visibility scan (Algorithm A.1 contract).

inline std::vector<Point2> farthest_visible_scan(const std::vector<Point2>& pts,
                                                 const std::vector<fwis::ConvexPolygon>& obs) {
  const int n = static_cast<int>(pts.size());
  if (n == 0) return {};
  std::vector<Point2> v{pts[0]};
  if (n == 1) return v;
  int k = 0;
  while (true) {
    const Point2 cur = v.back();
    int stop = -1;
    bool reached_goal = false;
    for (int j = k + 1; j < n; ++j) {
      if (j == n - 1) {
        reached_goal = true;
        break;
      }
      if (!fwis::is_visible(cur, pts[j], obs)) {
        stop = j;
        break;
      }
    }
    if (reached_goal) {
      v.push_back(pts[n - 1]);
      return v;
    }
    v.push_back(pts[stop - 1]);
    k = stop - 1;
  }
}

// ---------------------------------------------------------------------------
// Plain Dijkstra over the same occupancy grid (no heuristic).

inline double dijkstra_path_length(const fwis::OccupancyGrid& grid, const Point2& start,
                                   const Point2& goal) {
  int sx, sy, gx, gy;
  grid.cell_of(start, sx, sy);
  grid.cell_of(goal, gx, gy);
  const size_t n = static_cast<size_t>(grid.nx) * grid.ny;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<uint8_t> done(n, 0);
  if (grid.is_blocked(sx, sy) || grid.is_blocked(gx, gy))
    return std::numeric_limits<double>::infinity();
  dist[sy * grid.nx + sx] = 0.0;
  for (;;) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
      if (!done[i] && dist[i] < bd) {
        bd = dist[i];
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    done[best] = 1;
    if (best == gy * grid.nx + gx) break;
    const int cx = best % grid.nx, cy = best / grid.nx;
    const int ddx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int ddy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int q = 0; q < 8; ++q) {
      const int nx2 = cx + ddx[q], ny2 = cy + ddy[q];
      if (!grid.in_bounds(nx2, ny2) || grid.is_blocked(nx2, ny2)) continue;
      const double w = (q < 4 ? 1.0 : std::sqrt(2.0)) * grid.resolution;
      if (dist[best] + w < dist[ny2 * grid.nx + nx2]) dist[ny2 * grid.nx + nx2] = dist[best] + w;
    }
  }
  return dist[gy * grid.nx + gx];
}

}  // namespace oracle
