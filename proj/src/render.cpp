#include "fwis/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fwis {

namespace {

constexpr double kScale = 20.0;  // pixels per meter
constexpr double kPad = 20.0;

struct Mapper {
  Workspace ws;
  double px(double x) const { return kPad + (x - ws.xmin) * kScale; }
  double py(double y) const { return kPad + (ws.ymax - y) * kScale; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void polygon(std::ofstream& out, const Mapper& m, const ConvexPolygon& poly, const char* fill,
             const char* stroke, double opacity) {
  out << "<polygon points=\"";
  for (size_t i = 0; i < poly.vertices.size(); ++i) {
    if (i) out << " ";
    out << num(m.px(poly.vertices[i].x)) << "," << num(m.py(poly.vertices[i].y));
  }
  out << "\" fill=\"" << fill << "\" fill-opacity=\"" << num(opacity) << "\" stroke=\"" << stroke
      << "\" stroke-width=\"1\"/>\n";
}

const char* obstacle_fill(ObstacleKind k) {
  switch (k) {
    case ObstacleKind::NonTraversable: return "#3a3a3a";
    case ObstacleKind::Crossable: return "#e69f00";
    case ObstacleKind::DriveOver: return "#d4c430";
  }
  return "#000";
}

const char* mode_color(MotionMode m) {
  switch (m) {
    case MotionMode::Ackermann: return "#0072b2";
    case MotionMode::Diagonal: return "#9b59b6";
    case MotionMode::ZeroTurn: return "#d62728";
  }
  return "#000";
}

}  // namespace

void render_svg(const RenderLayers& layers, const std::string& path) {
  if (layers.scenario == nullptr) throw std::runtime_error("render_svg: scenario layer required");
  const Scenario& s = *layers.scenario;
  const Mapper m{s.workspace};
  const double width = 2 * kPad + s.workspace.width() * kScale;
  const double height = 2 * kPad + s.workspace.height() * kScale + 70.0;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("render_svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\">\n";
  out << "<rect x=\"" << num(kPad) << "\" y=\"" << num(kPad) << "\" width=\""
      << num(s.workspace.width() * kScale) << "\" height=\"" << num(s.workspace.height() * kScale)
      << "\" fill=\"white\" stroke=\"#888\"/>\n";

  for (const StaticObstacle& o : s.statics) {
    polygon(out, m, o.shape, obstacle_fill(o.attribute.kind), "#222", 0.85);
  }

  if (layers.forecast_horizon > 0 && layers.forecast_steps > 0) {
    for (const PedestrianTrack& t : s.pedestrians) {
      for (int k = 0; k <= layers.forecast_horizon; k += layers.forecast_steps) {
        const Point2 p = predict_pedestrian(t, k, layers.forecast_dt);
        double vx, vy;
        position_variance(t, k, layers.forecast_dt, vx, vy);
        out << "<ellipse cx=\"" << num(m.px(p.x)) << "\" cy=\"" << num(m.py(p.y)) << "\" rx=\""
            << num(std::sqrt(vx) * kScale) << "\" ry=\"" << num(std::sqrt(vy) * kScale)
            << "\" fill=\"#e41a1c\" fill-opacity=\"0.12\" stroke=\"#e41a1c\" "
               "stroke-width=\"0.5\"/>\n";
      }
    }
  }

  if (layers.corridors != nullptr) {
    for (const DrivingCorridor& c : *layers.corridors) {
      out << "<rect x=\"" << num(m.px(c.left())) << "\" y=\"" << num(m.py(c.up())) << "\" width=\""
          << num((c.right() - c.left()) * kScale) << "\" height=\""
          << num((c.up() - c.down()) * kScale)
          << "\" fill=\"none\" stroke=\"#56b4e9\" stroke-width=\"0.4\"/>\n";
    }
  }

  if (layers.coarse != nullptr && !layers.coarse->states.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#777\" stroke-width=\"1.2\" "
           "stroke-dasharray=\"4 3\" points=\"";
    for (size_t i = 0; i < layers.coarse->states.size(); ++i) {
      if (i) out << " ";
      out << num(m.px(layers.coarse->states[i].state.x)) << ","
          << num(m.py(layers.coarse->states[i].state.y));
    }
    out << "\"/>\n";
  }

  if (layers.trajectory != nullptr && layers.trajectory->n > 0) {
    const Trajectory& t = *layers.trajectory;
    for (int k = 0; k < t.n; ++k) {
      out << "<line x1=\"" << num(m.px(t.x[k])) << "\" y1=\"" << num(m.py(t.y[k])) << "\" x2=\""
          << num(m.px(t.x[k + 1])) << "\" y2=\"" << num(m.py(t.y[k + 1])) << "\" stroke=\""
          << mode_color(t.modes[k]) << "\" stroke-width=\"2\"/>\n";
      if (t.modes[k] == MotionMode::ZeroTurn) {
        out << "<circle cx=\"" << num(m.px(t.x[k])) << "\" cy=\"" << num(m.py(t.y[k]))
            << "\" r=\"3\" fill=\"#d62728\"/>\n";
      }
    }
  }

  if (layers.key_points != nullptr) {
    for (size_t i = 0; i < layers.key_points->points.size(); ++i) {
      const GuidedPoint& g = layers.key_points->points[i];
      const bool shift = layers.key_points->gear_shift_index &&
                         *layers.key_points->gear_shift_index == static_cast<int>(i);
      out << "<circle cx=\"" << num(m.px(g.x)) << "\" cy=\"" << num(m.py(g.y)) << "\" r=\""
          << (shift ? 5 : 3) << "\" fill=\"" << (shift ? "#d62728" : "#009e73") << "\"/>\n";
      out << "<line x1=\"" << num(m.px(g.x)) << "\" y1=\"" << num(m.py(g.y)) << "\" x2=\""
          << num(m.px(g.x + 0.8 * std::cos(g.theta))) << "\" y2=\""
          << num(m.py(g.y + 0.8 * std::sin(g.theta))) << "\" stroke=\"#009e73\" "
             "stroke-width=\"1\"/>\n";
    }
  }

  const VehicleParams vp;
  polygon(out, m, vehicle_footprint(s.init, vp), "#ff00ff", "#aa00aa", 0.6);
  polygon(out, m, vehicle_footprint(s.goal, vp), "#00ff00", "#00aa00", 0.6);

  const double ly = 2 * kPad + s.workspace.height() * kScale;
  out << "<text x=\"" << num(kPad) << "\" y=\"" << num(ly + 14)
      << "\" font-size=\"11\" font-family=\"sans-serif\">"
      << "blocked #3a3a3a | crossable #e69f00 | drive-over #d4c430 | corridor #56b4e9 | "
         "coarse dashed | ackermann #0072b2 | diagonal #9b59b6 | zero-turn #d62728</text>\n";
  out << "<text x=\"" << num(kPad) << "\" y=\"" << num(ly + 30)
      << "\" font-size=\"11\" font-family=\"sans-serif\">init magenta, goal green, pedestrian "
         "1-sigma red ellipses</text>\n";
  out << "</svg>\n";
}

}  // namespace fwis
