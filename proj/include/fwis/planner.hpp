#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwis/grid.hpp"
#include "fwis/reeds_shepp.hpp"
#include "fwis/scenario.hpp"

namespace fwis {

enum class MotionMode : uint8_t { Ackermann = 1, Diagonal = 2, ZeroTurn = 3 };

const char* mode_name(MotionMode m);

struct CostWeights {
  double w_ra = 1.0;  // reversing penalty, Ackermann
  double w_ta = 0.5;  // steering change penalty, Ackermann
  double w_rd = 1.0;  // reversing penalty, diagonal
  double w_td = 0.5;  // steering change penalty, diagonal
  double w_oz = 0.5;  // orientation change penalty, zero-turn
  double w_r1 = 0.2;  // wheel change penalty, Ackermann
  double w_r2 = 0.2;  // wheel change penalty, diagonal
  double w_r3 = 0.2;  // wheel change penalty, zero-turn
};

struct MotionPrimitive {
  MotionMode mode = MotionMode::Ackermann;
  double direction = 1.0;  // +1 forward, -1 reverse; rotation sign for zero-turn
  double steer = 0.0;      // steering angle (Ackermann) or crab angle (diagonal)
  double amount = 1.0;     // arc/chord length in meters, or |dtheta| for zero-turn
};

// Ackermann forward/reverse over five steering angles, diagonal
// forward/reverse over four crab angles, zero-turn over two increments
// per spin direction.
std::vector<MotionPrimitive> default_motion_set(const VehicleParams& params);

struct PlannerConfig {
  CostWeights weights;
  int max_iterations_direct = 150;  // node pops, full search
  int max_iterations_guided = 30;   // node pops, per segment
  double grid_resolution = 0.5;
  double xy_bin = 0.5;
  double theta_bin = M_PI / 18.0;
  double collision_margin = 0.05;  // clearance kept beyond exact polygon contact
  double sample_ds = 0.05;         // collision sampling step along motions
  double tire_width = 0.1;
  double nominal_speed = 1.0;  // primitive travel speed, m/s
  double integration_step = 1e-4;  // ODE step for node expansion, seconds
  bool enable_crossable = true;    // attempt to straddle low obstacles
  bool enable_drive_over = true;   // attempt speed-limited traversal
};

// Integrates the active mode's kinematics with constant controls:
// curvilinear motion with the doubled-tangent heading rate, crab
// translation with frozen heading, or in-place rotation at the fixed yaw
// rate.
VehicleState expand_state(const VehicleState& from, const MotionPrimitive& action,
                          const VehicleParams& params, double integration_step = 1e-4);

// Same integration, recording intermediate states roughly every record_ds
// meters of arc (or radians of rotation).
std::vector<VehicleState> integrate_primitive(const VehicleState& from,
                                              const MotionPrimitive& action,
                                              const VehicleParams& params, double record_ds,
                                              double integration_step = 1e-4);

double node_step_cost(const VehicleState& parent, const VehicleState& child, MotionMode child_mode,
                      const CostWeights& w);

// Recover + change terms; calling with equal modes is a contract violation.
double mode_switch_cost(MotionMode parent_mode, const VehicleState& parent, MotionMode child_mode,
                        const VehicleState& child, const CostWeights& w);

enum class DecisionAction : uint8_t { Cross = 0, DriveOver = 1 };

struct ObstacleDecision {
  int obstacle = -1;
  DecisionAction action = DecisionAction::Cross;
  bool operator==(const ObstacleDecision&) const = default;
};

struct CoarseState {
  VehicleState state;
  MotionMode mode = MotionMode::Ackermann;
  std::vector<ObstacleDecision> decisions;  // obstacles overlapped at this sample
};

struct CoarsePath {
  std::vector<CoarseState> states;

  double length() const;
  bool empty() const { return states.empty(); }
};

// Obstacle set with precomputed broad-phase data.
struct PlannerEnv {
  const Scenario* scenario = nullptr;
  VehicleParams params;
  PlannerConfig cfg;
  struct ObstacleRef {
    int index;
    ObstacleKind kind;
    double height;
    Point2 centroid;
    double circumradius;
  };
  std::vector<ObstacleRef> obstacles;
  OccupancyGrid grid;  // inflated occupancy for the holonomic heuristic

  PlannerEnv(const Scenario& s, const VehicleParams& p, const PlannerConfig& c);
};

// Chassis-clearance and wheel-track test over a sampled motion.
bool f_crossable(const std::vector<VehicleState>& samples, const StaticObstacle& obstacle,
                 const VehicleParams& params, const PlannerConfig& cfg);

// Hierarchical resolution for every obstacle the swept footprint touches:
// cross when the wheels clear, else drive over (drive-over kind only),
// else the motion fails. Returns the decision per overlapped obstacle, or
// nullopt when some obstacle cannot be resolved.
std::optional<std::map<int, DecisionAction>> obstacle_handling(
    const std::vector<VehicleState>& samples, MotionMode mode, const PlannerEnv& env);

// max of the curvature-bounded analytic distance (obstacles ignored) and
// the holonomic grid distance (kinematics ignored). distance_field comes
// from dijkstra_distance_field over env.grid for the same goal.
double heuristic_cost(const VehicleState& s, const Pose2& goal, const PlannerEnv& env,
                      const std::vector<double>& distance_field);

struct ConnectResult {
  std::vector<VehicleState> samples;
  std::map<int, DecisionAction> decisions;
  double length = 0.0;
};

// Shortest curvature-bounded connection (degenerating to a straight
// segment when headings align with the chord), validated by the obstacle
// hierarchy. nullopt is the failure signal.
std::optional<ConnectResult> traj_connect(const Pose2& a, const Pose2& b, const PlannerEnv& env);

struct SegmentResult {
  CoarsePath path;
  int reached;  // index of the key point the segment lands on
};

// Best-first segment search from key point i toward the farthest
// connectable downstream key point.
std::optional<SegmentResult> improved_hybrid_astar(int i, const std::vector<Pose2>& key_points,
                                                   const PlannerEnv& env);

// Direct search between two states, bounded by the full-search iteration
// cap.
std::optional<CoarsePath> fourwis_hybrid_astar(const VehicleState& start, const VehicleState& goal,
                                               const PlannerEnv& env);

enum class PolicyOverride { Auto, ForceHard, ForceEasy };

struct InitialPathResult {
  std::optional<CoarsePath> path;
  bool used_guided = false;
  std::string failure;  // empty on success
};

// Scene-complexity gate followed by either guided segment stitching or the
// direct search. classify_hard is consulted only under Auto.
InitialPathResult initial_path(const Scenario& s, const VehicleParams& params,
                               const PlannerConfig& cfg, PolicyOverride policy,
                               const std::function<bool()>& classify_hard = {});

void save_coarse_path(const CoarsePath& path, const std::string& file);

}  // namespace fwis
