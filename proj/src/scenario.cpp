#include "fwis/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fwis {

namespace {

constexpr uint8_t kWhite[3] = {255, 255, 255};
constexpr uint8_t kBlack[3] = {0, 0, 0};
constexpr uint8_t kMagenta[3] = {255, 0, 255};
constexpr uint8_t kGreen[3] = {0, 255, 0};

ConvexPolygon random_convex_polygon(Rng& rng, int n_vertices, double target_area) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> angles(n_vertices);
    for (double& a : angles) a = rng.uniform(0.0, 2.0 * M_PI);
    std::sort(angles.begin(), angles.end());
    ConvexPolygon poly;
    poly.vertices.reserve(n_vertices);
    for (double a : angles) {
      const double r = rng.uniform(0.6, 1.0);
      poly.vertices.push_back({r * std::cos(a), r * std::sin(a)});
    }
    if (!poly.valid()) continue;
    const double scale = std::sqrt(target_area / poly.area());
    for (Point2& v : poly.vertices) v = v * scale;
    if (!poly.valid()) continue;
    // Slivers blow up under area scaling; keep shapes placeable.
    double reach = 0.0;
    for (const Point2& v : poly.vertices) reach = std::max(reach, v.norm());
    if (reach > 12.0) continue;
    return poly;
  }
  throw std::runtime_error("scenario generation: convex polygon sampling failed");
}

bool polygon_in_workspace(const ConvexPolygon& poly, const Workspace& ws) {
  for (const Point2& v : poly.vertices) {
    if (!ws.contains(v)) return false;
  }
  return true;
}

bool footprint_in_workspace(const VehicleState& s, const VehicleParams& p, const Workspace& ws) {
  for (const Point2& v : vehicle_footprint(s, p).vertices) {
    if (!ws.contains(v)) return false;
  }
  return true;
}

void fail_parse(const std::string& path, int line, const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* kind_name(ObstacleKind k) {
  switch (k) {
    case ObstacleKind::NonTraversable: return "nontraversable";
    case ObstacleKind::Crossable: return "crossable";
    case ObstacleKind::DriveOver: return "driveover";
  }
  return "?";
}

std::vector<ConvexPolygon> Scenario::shapes_of(ObstacleKind kind) const {
  std::vector<ConvexPolygon> out;
  for (const StaticObstacle& o : statics) {
    if (o.attribute.kind == kind) out.push_back(o.shape);
  }
  return out;
}

std::vector<ConvexPolygon> Scenario::all_shapes() const {
  std::vector<ConvexPolygon> out;
  out.reserve(statics.size());
  for (const StaticObstacle& o : statics) out.push_back(o.shape);
  return out;
}

bool scenarios_equal(const Scenario& a, const Scenario& b) {
  if (!(a.workspace == b.workspace) || a.seed != b.seed) return false;
  if (a.statics.size() != b.statics.size() || a.pedestrians.size() != b.pedestrians.size())
    return false;
  const auto state_eq = [](const VehicleState& s, const VehicleState& t) {
    return s.x == t.x && s.y == t.y && s.v == t.v && s.theta == t.theta && s.delta == t.delta;
  };
  if (!state_eq(a.init, b.init) || !state_eq(a.goal, b.goal)) return false;
  for (size_t i = 0; i < a.statics.size(); ++i) {
    if (!(a.statics[i].attribute == b.statics[i].attribute)) return false;
    const auto& va = a.statics[i].shape.vertices;
    const auto& vb = b.statics[i].shape.vertices;
    if (va.size() != vb.size()) return false;
    for (size_t j = 0; j < va.size(); ++j) {
      if (va[j].x != vb[j].x || va[j].y != vb[j].y) return false;
    }
  }
  for (size_t i = 0; i < a.pedestrians.size(); ++i) {
    if (!(a.pedestrians[i] == b.pedestrians[i])) return false;
  }
  return true;
}

Scenario generate_scenario(uint64_t seed, int n_obstacles, const VehicleParams& params,
                           const GenerationConfig& cfg) {
  if (n_obstacles < 0) throw std::runtime_error("generate_scenario: n_obstacles < 0");
  Rng rng(seed);
  Scenario s;
  s.seed = seed;

  for (int i = 0; i < n_obstacles; ++i) {
    const int nv = rng.uniform_int(4, 7);
    const double area = rng.uniform(cfg.area_min, cfg.area_max);
    ConvexPolygon base = random_convex_polygon(rng, nv, area);
    StaticObstacle obs;
    int rejections = 0;
    for (;; ++rejections) {
      if (rejections > cfg.max_rejections)
        throw std::runtime_error("generate_scenario: obstacle placement failed");
      const Point2 c{rng.uniform(s.workspace.xmin, s.workspace.xmax),
                     rng.uniform(s.workspace.ymin, s.workspace.ymax)};
      obs.shape = base;
      for (Point2& v : obs.shape.vertices) v = v + c;
      if (polygon_in_workspace(obs.shape, s.workspace)) break;
    }
    const double u = rng.unit();
    const double hv = params.ground_clearance;
    if (u < cfg.p_nontraversable) {
      obs.attribute = {ObstacleKind::NonTraversable, rng.uniform(0.5, 2.0)};
    } else if (u < cfg.p_nontraversable + cfg.p_crossable) {
      obs.attribute = {ObstacleKind::Crossable, rng.uniform(0.0, 0.8 * hv)};
    } else {
      obs.attribute = {ObstacleKind::DriveOver, rng.uniform(0.0, 0.5 * hv)};
    }
    s.statics.push_back(obs);
  }

  const std::vector<ConvexPolygon> blocking = s.shapes_of(ObstacleKind::NonTraversable);
  const auto sample_state = [&](VehicleState& out) {
    for (int rejections = 0; rejections <= cfg.max_rejections; ++rejections) {
      VehicleState st;
      st.x = rng.uniform(s.workspace.xmin, s.workspace.xmax);
      st.y = rng.uniform(s.workspace.ymin, s.workspace.ymax);
      st.theta = rng.uniform(-M_PI, M_PI);
      const ConvexPolygon fp = vehicle_footprint(st, params);
      bool free = footprint_in_workspace(st, params, s.workspace);
      for (const ConvexPolygon& obs : blocking) {
        if (!free) break;
        if (polygons_intersect(fp, obs)) free = false;
      }
      if (free) {
        out = st;
        return;
      }
    }
    throw std::runtime_error("generate_scenario: free-space sampling failed");
  };
  sample_state(s.init);
  sample_state(s.goal);

  const int n_peds = rng.uniform_int(cfg.min_pedestrians, cfg.max_pedestrians);
  for (int i = 0; i < n_peds; ++i) {
    PedestrianTrack t;
    t.x0 = rng.uniform(s.workspace.xmin, s.workspace.xmax);
    t.y0 = rng.uniform(s.workspace.ymin, s.workspace.ymax);
    const double speed = rng.uniform(0.5, 1.5);
    const double heading = rng.uniform(-M_PI, M_PI);
    t.vx = speed * std::cos(heading);
    t.vy = speed * std::sin(heading);
    t.ax = rng.uniform(-0.2, 0.2);
    t.ay = rng.uniform(-0.2, 0.2);
    t.var_x = rng.uniform(0.04, 0.16);
    t.var_y = rng.uniform(0.04, 0.16);
    t.var_vx = t.var_vy = 0.01;
    t.var_ax = t.var_ay = 0.005;
    s.pedestrians.push_back(t);
  }
  return s;
}

namespace {

SceneImage rasterize_impl(const Scenario& s, int width, int height, const VehicleParams& params,
                          bool parallel) {
  if (width <= 0 || height <= 0) throw std::runtime_error("rasterize_scene: bad dimensions");
  SceneImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<size_t>(width) * height * 3, 255);

  const std::vector<ConvexPolygon> shapes = s.all_shapes();
  const ConvexPolygon init_fp = vehicle_footprint(s.init, params);
  const ConvexPolygon goal_fp = vehicle_footprint(s.goal, params);

  std::vector<long> row_counts(static_cast<size_t>(height) * 3, 0);

#pragma omp parallel for schedule(static) if (parallel)
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const Point2 p{s.workspace.xmin + (col + 0.5) / width * s.workspace.width(),
                     s.workspace.ymax - (row + 0.5) / height * s.workspace.height()};
      const uint8_t* color = kWhite;
      for (const ConvexPolygon& shape : shapes) {
        if (shape.contains(p)) {
          color = kBlack;
          break;
        }
      }
      // Goal paints last on overlap with init.
      if (init_fp.contains(p)) color = kMagenta;
      if (goal_fp.contains(p)) color = kGreen;
      std::memcpy(&img.pixels[3 * (static_cast<size_t>(row) * width + col)], color, 3);
      if (color == kMagenta)
        ++row_counts[3 * row];
      else if (color == kGreen)
        ++row_counts[3 * row + 1];
      else if (color == kBlack)
        ++row_counts[3 * row + 2];
    }
  }
  for (int row = 0; row < height; ++row) {
    img.painted_init += row_counts[3 * row];
    img.painted_goal += row_counts[3 * row + 1];
    img.painted_obs += row_counts[3 * row + 2];
  }
  img.painted_free =
      static_cast<long>(width) * height - img.painted_init - img.painted_goal - img.painted_obs;
  return img;
}

}  // namespace

SceneImage rasterize_scene(const Scenario& s, int width, int height, const VehicleParams& params) {
  return rasterize_impl(s, width, height, params, true);
}

SceneImage rasterize_scene_serial(const Scenario& s, int width, int height,
                                  const VehicleParams& params) {
  return rasterize_impl(s, width, height, params, false);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scenario: cannot open " + path);
  out << "fwis-scenario 1\n";
  out << "seed " << s.seed << "\n";
  out << "workspace " << fmt_double(s.workspace.xmin) << " " << fmt_double(s.workspace.ymin) << " "
      << fmt_double(s.workspace.xmax) << " " << fmt_double(s.workspace.ymax) << "\n";
  const auto put_state = [&](const char* tag, const VehicleState& st) {
    out << tag << " " << fmt_double(st.x) << " " << fmt_double(st.y) << " " << fmt_double(st.v)
        << " " << fmt_double(st.theta) << " " << fmt_double(st.delta) << "\n";
  };
  put_state("init", s.init);
  put_state("goal", s.goal);
  out << "obstacles " << s.statics.size() << "\n";
  for (const StaticObstacle& o : s.statics) {
    out << "obstacle " << kind_name(o.attribute.kind) << " " << fmt_double(o.attribute.height)
        << " " << o.shape.vertices.size() << "\n";
    for (const Point2& v : o.shape.vertices) {
      out << "v " << fmt_double(v.x) << " " << fmt_double(v.y) << "\n";
    }
  }
  out << "pedestrians " << s.pedestrians.size() << "\n";
  for (const PedestrianTrack& t : s.pedestrians) {
    out << "pedestrian " << fmt_double(t.x0) << " " << fmt_double(t.y0) << " " << fmt_double(t.vx)
        << " " << fmt_double(t.vy) << " " << fmt_double(t.ax) << " " << fmt_double(t.ay) << " "
        << fmt_double(t.var_x) << " " << fmt_double(t.var_y) << " " << fmt_double(t.var_vx) << " "
        << fmt_double(t.var_vy) << " " << fmt_double(t.var_ax) << " " << fmt_double(t.var_ay)
        << "\n";
  }
  if (!out) throw std::runtime_error("save_scenario: write failed for " + path);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
  Scenario s;
  std::string line;
  int lineno = 0;
  const auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line[0] != '#') return;
    }
    fail_parse(path, lineno, std::string("unexpected end of file, expected ") + what);
  };

  next_line("header");
  {
    std::istringstream is(line);
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "fwis-scenario" || version != 1)
      fail_parse(path, lineno, "bad header, expected 'fwis-scenario 1'");
  }
  next_line("seed");
  {
    std::istringstream is(line);
    std::string tag;
    is >> tag >> s.seed;
    if (!is || tag != "seed") fail_parse(path, lineno, "expected 'seed <n>'");
  }
  next_line("workspace");
  {
    std::istringstream is(line);
    std::string tag;
    is >> tag >> s.workspace.xmin >> s.workspace.ymin >> s.workspace.xmax >> s.workspace.ymax;
    if (!is || tag != "workspace") fail_parse(path, lineno, "expected 'workspace x0 y0 x1 y1'");
    if (s.workspace.xmax <= s.workspace.xmin || s.workspace.ymax <= s.workspace.ymin)
      fail_parse(path, lineno, "field workspace: empty extent");
  }
  const auto read_state = [&](const char* tag, VehicleState& st) {
    next_line(tag);
    std::istringstream is(line);
    std::string t;
    is >> t >> st.x >> st.y >> st.v >> st.theta >> st.delta;
    if (!is || t != tag) fail_parse(path, lineno, std::string("expected '") + tag + " x y v theta delta'");
  };
  read_state("init", s.init);
  read_state("goal", s.goal);

  size_t n_obs = 0;
  next_line("obstacles");
  {
    std::istringstream is(line);
    std::string tag;
    is >> tag >> n_obs;
    if (!is || tag != "obstacles") fail_parse(path, lineno, "expected 'obstacles <n>'");
  }
  for (size_t i = 0; i < n_obs; ++i) {
    next_line("obstacle");
    std::istringstream is(line);
    std::string tag, kind;
    double height = 0.0;
    size_t nv = 0;
    is >> tag >> kind >> height >> nv;
    if (!is || tag != "obstacle")
      fail_parse(path, lineno, "expected 'obstacle <kind> <height> <nverts>'");
    StaticObstacle o;
    if (kind == "nontraversable")
      o.attribute.kind = ObstacleKind::NonTraversable;
    else if (kind == "crossable")
      o.attribute.kind = ObstacleKind::Crossable;
    else if (kind == "driveover")
      o.attribute.kind = ObstacleKind::DriveOver;
    else
      fail_parse(path, lineno, "field kind: unknown obstacle kind '" + kind + "'");
    if (height < 0.0) fail_parse(path, lineno, "field height: must be >= 0");
    o.attribute.height = height;
    for (size_t j = 0; j < nv; ++j) {
      next_line("v");
      std::istringstream vs(line);
      std::string vt;
      Point2 p;
      vs >> vt >> p.x >> p.y;
      if (!vs || vt != "v") fail_parse(path, lineno, "expected 'v x y'");
      o.shape.vertices.push_back(p);
    }
    if (!o.shape.valid())
      fail_parse(path, lineno, "field vertices: polygon is not strictly convex ccw");
    s.statics.push_back(std::move(o));
  }

  size_t n_ped = 0;
  next_line("pedestrians");
  {
    std::istringstream is(line);
    std::string tag;
    is >> tag >> n_ped;
    if (!is || tag != "pedestrians") fail_parse(path, lineno, "expected 'pedestrians <n>'");
  }
  for (size_t i = 0; i < n_ped; ++i) {
    next_line("pedestrian");
    std::istringstream is(line);
    std::string tag;
    PedestrianTrack t;
    is >> tag >> t.x0 >> t.y0 >> t.vx >> t.vy >> t.ax >> t.ay >> t.var_x >> t.var_y >> t.var_vx >>
        t.var_vy >> t.var_ax >> t.var_ay;
    if (!is || tag != "pedestrian") fail_parse(path, lineno, "expected 'pedestrian <12 numbers>'");
    if (t.var_x < 0 || t.var_y < 0 || t.var_vx < 0 || t.var_vy < 0 || t.var_ax < 0 || t.var_ay < 0)
      fail_parse(path, lineno, "field variance: must be >= 0");
    s.pedestrians.push_back(t);
  }
  return s;
}

void write_ppm(const SceneImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

SceneImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || maxval != 255 || w <= 0 || h <= 0)
    throw std::runtime_error("read_ppm: not an 8-bit P6 file: " + path);
  in.get();
  SceneImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw std::runtime_error("read_ppm: truncated file: " + path);
  return img;
}

}  // namespace fwis
