#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fwis/geometry.hpp"

namespace fwis {

// Deterministic uniform draws on top of mt19937_64; the raw-bits-to-double
// mapping is spelled out so generation is reproducible across platforms.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(uint64_t seed) : eng(seed) {}

  double unit() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  int uniform_int(int a, int b) {  // inclusive bounds
    return a + static_cast<int>(eng() % static_cast<uint64_t>(b - a + 1));
  }
};

enum class ObstacleKind { NonTraversable, Crossable, DriveOver };

const char* kind_name(ObstacleKind k);

struct ObstacleAttribute {
  ObstacleKind kind = ObstacleKind::NonTraversable;
  double height = 1.0;  // meters

  bool operator==(const ObstacleAttribute&) const = default;
};

struct StaticObstacle {
  ConvexPolygon shape;
  ObstacleAttribute attribute;
};

struct PedestrianTrack {
  double x0 = 0.0, y0 = 0.0;
  double vx = 0.0, vy = 0.0;
  double ax = 0.0, ay = 0.0;
  // Diagonal noise model: initial position, velocity, and per-step
  // acceleration variances.
  double var_x = 0.0, var_y = 0.0;
  double var_vx = 0.0, var_vy = 0.0;
  double var_ax = 0.0, var_ay = 0.0;

  bool operator==(const PedestrianTrack&) const = default;
};

struct Workspace {
  double xmin = 0.0, ymin = 0.0, xmax = 40.0, ymax = 40.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(const Point2& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  bool operator==(const Workspace&) const = default;
};

struct Scenario {
  Workspace workspace;
  std::vector<StaticObstacle> statics;
  std::vector<PedestrianTrack> pedestrians;
  VehicleState init;
  VehicleState goal;
  uint64_t seed = 0;

  std::vector<ConvexPolygon> shapes_of(ObstacleKind kind) const;
  std::vector<ConvexPolygon> all_shapes() const;
};

bool scenarios_equal(const Scenario& a, const Scenario& b);

// RGB raster with the fixed four-color palette. Painted-pixel tallies are
// recorded while rendering so downstream mask counting can be checked
// against them.
struct SceneImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major RGB, row 0 at the top of the workspace

  long painted_init = 0;
  long painted_goal = 0;
  long painted_obs = 0;
  long painted_free = 0;

  const uint8_t* at(int col, int row) const { return &pixels[3 * (row * width + col)]; }
};

struct GenerationConfig {
  int max_rejections = 10000;
  double area_min = 5.0;
  double area_max = 50.0;
  // Attribute mix for generated obstacles.
  double p_nontraversable = 0.5;
  double p_crossable = 0.25;
  int min_pedestrians = 0;
  int max_pedestrians = 2;
};

// Deterministic in (seed, n_obstacles). Throws std::runtime_error when
// free-space sampling for init/goal keeps failing.
Scenario generate_scenario(uint64_t seed, int n_obstacles, const VehicleParams& params = {},
                           const GenerationConfig& cfg = {});

SceneImage rasterize_scene(const Scenario& s, int width, int height,
                           const VehicleParams& params = {});
// Reference implementation without the row-parallel loop.
SceneImage rasterize_scene_serial(const Scenario& s, int width, int height,
                                  const VehicleParams& params = {});

void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

void write_ppm(const SceneImage& img, const std::string& path);
SceneImage read_ppm(const std::string& path);

}  // namespace fwis
