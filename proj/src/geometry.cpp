#include "fwis/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fwis {

namespace {

constexpr double kOrientEps = 1e-12;

int orientation(const Point2& a, const Point2& b, const Point2& c) {
  const double v = (b - a).cross(c - a);
  if (v > kOrientEps) return 1;
  if (v < -kOrientEps) return -1;
  return 0;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) - kOrientEps <= p.x && p.x <= std::max(a.x, b.x) + kOrientEps &&
         std::min(a.y, b.y) - kOrientEps <= p.y && p.y <= std::max(a.y, b.y) + kOrientEps;
}

// Closed-segment intersection, collinear overlaps included.
bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  const int d1 = orientation(q1, q2, p1);
  const int d2 = orientation(q1, q2, p2);
  const int d3 = orientation(p1, p2, q1);
  const int d4 = orientation(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double segment_segment_distance(const Point2& p1, const Point2& p2, const Point2& q1,
                                const Point2& q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  double d = point_segment_distance(p1, q1, q2);
  d = std::min(d, point_segment_distance(p2, q1, q2));
  d = std::min(d, point_segment_distance(q1, p1, p2));
  d = std::min(d, point_segment_distance(q2, p1, p2));
  return d;
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol * 0.5, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol * 0.5, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fm = f(0.5 * (a + b));
  const double fb = f(b);
  return adaptive_simpson(f, a, b, fa, fm, fb, tol, 40);
}

}  // namespace

double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

double angle_diff(double a, double b) { return normalize_angle(a - b); }

bool ConvexPolygon::valid() const {
  const size_t n = vertices.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const Point2& c = vertices[(i + 2) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) return false;
    if (distance(a, b) < 1e-9) return false;
    if ((b - a).cross(c - b) <= kOrientEps) return false;  // strict ccw turns only
  }
  return true;
}

double ConvexPolygon::area() const {
  double s = 0.0;
  const size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) s += vertices[i].cross(vertices[(i + 1) % n]);
  return 0.5 * s;
}

Point2 ConvexPolygon::centroid() const {
  double cx = 0.0, cy = 0.0, s = 0.0;
  const size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    const double w = a.cross(b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
    s += w;
  }
  return {cx / (3.0 * s), cy / (3.0 * s)};
}

bool ConvexPolygon::contains(const Point2& p) const {
  const size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    if ((b - a).cross(p - a) < -1e-9) return false;
  }
  return true;
}

void ConvexPolygon::bounds(double& xmin, double& ymin, double& xmax, double& ymax) const {
  xmin = ymin = std::numeric_limits<double>::infinity();
  xmax = ymax = -std::numeric_limits<double>::infinity();
  for (const Point2& v : vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
}

bool segment_intersects_polygon(const Point2& a, const Point2& b, const ConvexPolygon& poly) {
  if (poly.contains(a) || poly.contains(b)) return true;
  const size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    if (segments_intersect(a, b, poly.vertices[i], poly.vertices[(i + 1) % n])) return true;
  }
  return false;
}

bool is_visible(const Point2& a, const Point2& b, const std::vector<ConvexPolygon>& obstacles) {
  for (const ConvexPolygon& obs : obstacles) {
    if (segment_intersects_polygon(a, b, obs)) return false;
  }
  return true;
}

bool polygons_intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  // Separating axis over both edge sets; touching counts as overlap.
  const auto separated_by = [](const ConvexPolygon& edges, const ConvexPolygon& p,
                               const ConvexPolygon& q) {
    const size_t n = edges.vertices.size();
    for (size_t i = 0; i < n; ++i) {
      const Point2 e = edges.vertices[(i + 1) % n] - edges.vertices[i];
      const Point2 axis{-e.y, e.x};
      double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
      for (const Point2& v : p.vertices) {
        const double d = axis.dot(v);
        pmin = std::min(pmin, d);
        pmax = std::max(pmax, d);
      }
      double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
      for (const Point2& v : q.vertices) {
        const double d = axis.dot(v);
        qmin = std::min(qmin, d);
        qmax = std::max(qmax, d);
      }
      if (pmax < qmin - kOrientEps || qmax < pmin - kOrientEps) return true;
    }
    return false;
  };
  if (separated_by(a, a, b)) return false;
  if (separated_by(b, a, b)) return false;
  return true;
}

double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (polygons_intersect(a, b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const size_t na = a.vertices.size(), nb = b.vertices.size();
  for (size_t i = 0; i < na; ++i) {
    for (size_t j = 0; j < nb; ++j) {
      best = std::min(best, segment_segment_distance(a.vertices[i], a.vertices[(i + 1) % na],
                                                     b.vertices[j], b.vertices[(j + 1) % nb]));
    }
  }
  return best;
}

double point_polygon_distance(const Point2& p, const ConvexPolygon& poly) {
  if (poly.contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]));
  }
  return best;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 < kOrientEps) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double default_clothoid_length(double r_min) { return 0.5 * M_PI * r_min; }

Point2 clothoid_point_ex(const Pose2& start, double r_min, double l, double total_length,
                         double curvature_sign, double direction) {
  // theta(s) = theta0 + sign * s^2 / (2 * r_min * total_length)
  const double c = curvature_sign / (2.0 * r_min * total_length);
  const double dx =
      integrate([&](double s) { return std::cos(start.theta + c * s * s); }, 0.0, l);
  const double dy =
      integrate([&](double s) { return std::sin(start.theta + c * s * s); }, 0.0, l);
  return {start.x + direction * dx, start.y + direction * dy};
}

double clothoid_heading(const Pose2& start, double r_min, double l, double total_length,
                        double curvature_sign, double direction) {
  const double theta = start.theta + curvature_sign * l * l / (2.0 * r_min * total_length);
  return normalize_angle(direction > 0 ? theta : theta + M_PI);
}

Point2 clothoid_point(const Pose2& start, double r_min, double l) {
  if (l < 0.0) throw std::domain_error("clothoid_point: negative arc length");
  return clothoid_point_ex(start, r_min, l, default_clothoid_length(r_min), 1.0, 1.0);
}

std::optional<ClothoidMeet> clothoid_intersection(const Pose2& pose1, const Pose2& pose2,
                                                  double r_min, double meet_tol) {
  const double total = default_clothoid_length(r_min);
  const int kCoarse = 80;

  // Candidate travel direction / turn side combinations, scanned in a
  // fixed order so results are reproducible.
  const double dirs[2] = {1.0, -1.0};
  const double signs[2] = {1.0, -1.0};

  for (double d1 : dirs) {
    for (double s1 : signs) {
      for (double d2 : dirs) {
        for (double s2 : signs) {
          std::vector<Point2> c1(kCoarse + 1), c2(kCoarse + 1);
          for (int i = 0; i <= kCoarse; ++i) {
            const double l = total * i / kCoarse;
            c1[i] = clothoid_point_ex(pose1, r_min, l, total, s1, d1);
            c2[i] = clothoid_point_ex(pose2, r_min, l, total, s2, d2);
          }
          double best = std::numeric_limits<double>::infinity();
          int bi = 0, bj = 0;
          for (int i = 0; i <= kCoarse; ++i) {
            for (int j = 0; j <= kCoarse; ++j) {
              const double d = distance(c1[i], c2[j]);
              if (d < best) {
                best = d;
                bi = i;
                bj = j;
              }
            }
          }
          if (best > 10.0 * meet_tol + 2.0 * total / kCoarse) continue;

          // Alternating ternary refinement around the coarse minimum.
          double l1 = total * bi / kCoarse, l2 = total * bj / kCoarse;
          double w = total / kCoarse;
          const auto dist_at = [&](double a, double b) {
            return distance(clothoid_point_ex(pose1, r_min, a, total, s1, d1),
                            clothoid_point_ex(pose2, r_min, b, total, s2, d2));
          };
          for (int it = 0; it < 20; ++it) {
            for (int axis = 0; axis < 2; ++axis) {
              double lo = std::max(0.0, (axis == 0 ? l1 : l2) - w);
              double hi = std::min(total, (axis == 0 ? l1 : l2) + w);
              for (int t = 0; t < 40; ++t) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                const double f1 = axis == 0 ? dist_at(m1, l2) : dist_at(l1, m1);
                const double f2 = axis == 0 ? dist_at(m2, l2) : dist_at(l1, m2);
                if (f1 < f2)
                  hi = m2;
                else
                  lo = m1;
              }
              (axis == 0 ? l1 : l2) = 0.5 * (lo + hi);
            }
            w *= 0.7;
          }
          // Newton endgame on the transversal crossing: intersect the local
          // tangent lines and step both arc parameters.
          for (int it = 0; it < 30; ++it) {
            const Point2 a = clothoid_point_ex(pose1, r_min, l1, total, s1, d1);
            const Point2 b = clothoid_point_ex(pose2, r_min, l2, total, s2, d2);
            if (distance(a, b) < 1e-13) break;
            const double th1 = pose1.theta + s1 * l1 * l1 / (2.0 * r_min * total);
            const double th2 = pose2.theta + s2 * l2 * l2 / (2.0 * r_min * total);
            const Point2 t1{d1 * std::cos(th1), d1 * std::sin(th1)};
            const Point2 t2{d2 * std::cos(th2), d2 * std::sin(th2)};
            const double det = t1.cross(t2) * -1.0;
            if (std::abs(det) < 1e-12) break;  // near-tangential, keep the descent result
            const Point2 rhs = b - a;
            const double step1 = (rhs.x * -t2.y + rhs.y * t2.x) / det;
            const double step2 = (t1.x * rhs.y - t1.y * rhs.x) / det;
            l1 = std::clamp(l1 + step1, 0.0, total);
            l2 = std::clamp(l2 + step2, 0.0, total);
          }
          const Point2 a = clothoid_point_ex(pose1, r_min, l1, total, s1, d1);
          const Point2 b = clothoid_point_ex(pose2, r_min, l2, total, s2, d2);
          if (distance(a, b) <= meet_tol) {
            ClothoidMeet meet;
            meet.point = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
            meet.tangent = clothoid_heading(pose1, r_min, l1, total, s1, d1);
            return meet;
          }
        }
      }
    }
  }
  return std::nullopt;
}

ConvexPolygon vehicle_footprint(const VehicleState& state, const VehicleParams& params) {
  const double xf = params.wheelbase / 2.0 + params.front_overhang;
  const double xr = -(params.wheelbase / 2.0 + params.rear_overhang);
  const double hw = params.width / 2.0;
  const double c = std::cos(state.theta), s = std::sin(state.theta);
  const auto place = [&](double bx, double by) -> Point2 {
    return {state.x + bx * c - by * s, state.y + bx * s + by * c};
  };
  ConvexPolygon poly;
  poly.vertices = {place(xr, -hw), place(xf, -hw), place(xf, hw), place(xr, hw)};
  return poly;
}

std::array<Point2, 4> wheel_positions(const VehicleState& state, const VehicleParams& params) {
  const double hx = params.wheelbase / 2.0;
  const double hy = params.track() / 2.0;
  const double c = std::cos(state.theta), s = std::sin(state.theta);
  const auto place = [&](double bx, double by) -> Point2 {
    return {state.x + bx * c - by * s, state.y + bx * s + by * c};
  };
  return {place(hx, hy), place(hx, -hy), place(-hx, hy), place(-hx, -hy)};
}

}  // namespace fwis
