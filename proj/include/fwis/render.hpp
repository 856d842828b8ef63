#pragma once

#include <string>
#include <vector>

#include "fwis/corridor.hpp"
#include "fwis/guided_points.hpp"
#include "fwis/ocp.hpp"
#include "fwis/planner.hpp"
#include "fwis/scenario.hpp"

namespace fwis {

// Any subset of layers may be present; output is byte-stable for identical
// inputs.
struct RenderLayers {
  const Scenario* scenario = nullptr;
  const CoarsePath* coarse = nullptr;
  const Trajectory* trajectory = nullptr;
  const std::vector<DrivingCorridor>* corridors = nullptr;
  const KeyPointSet* key_points = nullptr;
  int forecast_steps = 0;     // pedestrian ellipses drawn every this many steps
  double forecast_dt = 0.25;  // seconds per forecast step
  int forecast_horizon = 0;   // total steps to draw
};

void render_svg(const RenderLayers& layers, const std::string& path);

}  // namespace fwis
