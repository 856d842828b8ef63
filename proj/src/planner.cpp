#include "fwis/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "fwis/guided_points.hpp"

namespace fwis {

const char* mode_name(MotionMode m) {
  switch (m) {
    case MotionMode::Ackermann: return "ackermann";
    case MotionMode::Diagonal: return "diagonal";
    case MotionMode::ZeroTurn: return "zeroturn";
  }
  return "?";
}

std::vector<MotionPrimitive> default_motion_set(const VehicleParams& params) {
  std::vector<MotionPrimitive> set;
  const double dmax = params.max_steer;
  for (double dir : {1.0, -1.0}) {
    for (double steer : {-dmax, -dmax / 2.0, 0.0, dmax / 2.0, dmax}) {
      set.push_back({MotionMode::Ackermann, dir, steer, 1.0});
    }
  }
  for (double dir : {1.0, -1.0}) {
    for (double steer : {-M_PI / 2.0, -M_PI / 4.0, M_PI / 4.0, M_PI / 2.0}) {
      set.push_back({MotionMode::Diagonal, dir, steer, 1.0});
    }
  }
  for (double dir : {1.0, -1.0}) {
    for (double dtheta : {M_PI / 8.0, M_PI / 4.0}) {
      set.push_back({MotionMode::ZeroTurn, dir, 0.0, dtheta});
    }
  }
  return set;
}

std::vector<VehicleState> integrate_primitive(const VehicleState& from,
                                              const MotionPrimitive& action,
                                              const VehicleParams& params, double record_ds,
                                              double integration_step) {
  const double speed = 1.0;  // nominal primitive speed; arc length equals time
  double duration;
  double v = 0.0;
  switch (action.mode) {
    case MotionMode::Ackermann:
    case MotionMode::Diagonal:
      duration = action.amount / speed;
      v = action.direction * speed;
      break;
    case MotionMode::ZeroTurn:
    default:
      duration = action.amount / params.yaw_rate;
      break;
  }
  const int n = std::max(1, static_cast<int>(std::ceil(duration / integration_step)));
  const double h = duration / n;
  const int record_every =
      std::max(1, static_cast<int>(std::floor(record_ds / (speed * h))));

  double x = from.x, y = from.y, theta = from.theta;
  std::vector<VehicleState> out;
  out.reserve(static_cast<size_t>(n / record_every) + 2);
  const auto emit = [&]() {
    VehicleState s;
    s.x = x;
    s.y = y;
    s.theta = normalize_angle(theta);
    switch (action.mode) {
      case MotionMode::Ackermann:
      case MotionMode::Diagonal:
        s.v = v;
        s.delta = action.steer;
        break;
      case MotionMode::ZeroTurn:
        s.v = 0.0;
        s.delta = from.delta;
        break;
    }
    out.push_back(s);
  };
  emit();
  for (int i = 0; i < n; ++i) {
    switch (action.mode) {
      case MotionMode::Ackermann:
        x += h * v * std::cos(theta);
        y += h * v * std::sin(theta);
        theta += h * 2.0 * v * std::tan(action.steer) / params.wheelbase;
        break;
      case MotionMode::Diagonal:
        x += h * v * std::cos(theta + action.steer);
        y += h * v * std::sin(theta + action.steer);
        break;
      case MotionMode::ZeroTurn:
        theta += h * action.direction * params.yaw_rate;
        break;
    }
    if ((i + 1) % record_every == 0 || i + 1 == n) emit();
  }
  return out;
}

VehicleState expand_state(const VehicleState& from, const MotionPrimitive& action,
                          const VehicleParams& params, double integration_step) {
  // Recording step larger than any primitive keeps only the endpoints.
  return integrate_primitive(from, action, params, 1e9, integration_step).back();
}

double node_step_cost(const VehicleState& parent, const VehicleState& child, MotionMode child_mode,
                      const CostWeights& w) {
  switch (child_mode) {
    case MotionMode::Ackermann:
      return std::abs(parent.v - child.v) * w.w_ra + std::abs(parent.delta - child.delta) * w.w_ta;
    case MotionMode::Diagonal:
      return std::abs(parent.v - child.v) * w.w_rd + std::abs(parent.delta - child.delta) * w.w_td;
    case MotionMode::ZeroTurn:
    default:
      return std::abs(angle_diff(parent.theta, child.theta)) * w.w_oz;
  }
}

double mode_switch_cost(MotionMode parent_mode, const VehicleState& parent, MotionMode child_mode,
                        const VehicleState& child, const CostWeights& w) {
  if (parent_mode == child_mode)
    throw std::logic_error("mode_switch_cost: called with equal modes");
  double recover;
  switch (parent_mode) {
    case MotionMode::Ackermann: recover = w.w_r1 * std::abs(parent.delta); break;
    case MotionMode::Diagonal: recover = w.w_r2 * std::abs(parent.delta); break;
    case MotionMode::ZeroTurn:
    default: recover = w.w_r3; break;
  }
  double change;
  switch (child_mode) {
    case MotionMode::Ackermann: change = w.w_r1 * std::abs(child.delta); break;
    case MotionMode::Diagonal: change = w.w_r2 * std::abs(child.delta); break;
    case MotionMode::ZeroTurn:
    default: change = w.w_r3 * std::abs(angle_diff(parent.theta, child.theta)); break;
  }
  return recover + change;
}

double CoarsePath::length() const {
  double l = 0.0;
  for (size_t i = 1; i < states.size(); ++i) {
    l += distance(states[i - 1].state.position(), states[i].state.position());
  }
  return l;
}

PlannerEnv::PlannerEnv(const Scenario& s, const VehicleParams& p, const PlannerConfig& c)
    : scenario(&s), params(p), cfg(c) {
  obstacles.reserve(s.statics.size());
  for (size_t i = 0; i < s.statics.size(); ++i) {
    const StaticObstacle& o = s.statics[i];
    ObstacleRef ref;
    ref.index = static_cast<int>(i);
    ref.kind = o.attribute.kind;
    ref.height = o.attribute.height;
    ref.centroid = o.shape.centroid();
    ref.circumradius = 0.0;
    for (const Point2& v : o.shape.vertices) {
      ref.circumradius = std::max(ref.circumradius, distance(v, ref.centroid));
    }
    obstacles.push_back(ref);
  }
  grid = make_occupancy(s, p, c.grid_resolution);
}

namespace {

bool footprint_in_workspace(const ConvexPolygon& fp, const Workspace& ws) {
  for (const Point2& v : fp.vertices) {
    if (!ws.contains(v)) return false;
  }
  return true;
}

}  // namespace

bool f_crossable(const std::vector<VehicleState>& samples, const StaticObstacle& obstacle,
                 const VehicleParams& params, const PlannerConfig& cfg) {
  if (obstacle.attribute.height >= params.ground_clearance) return false;
  const double wheel_radius = cfg.tire_width / 2.0;
  for (const VehicleState& s : samples) {
    for (const Point2& w : wheel_positions(s, params)) {
      if (point_polygon_distance(w, obstacle.shape) <= wheel_radius) return false;
    }
  }
  return true;
}

std::optional<std::map<int, DecisionAction>> obstacle_handling(
    const std::vector<VehicleState>& samples, MotionMode mode, const PlannerEnv& env) {
  const VehicleParams& params = env.params;
  const PlannerConfig& cfg = env.cfg;
  const double body_radius = params.circumscribed_radius();

  std::vector<ConvexPolygon> footprints;
  footprints.reserve(samples.size());
  for (const VehicleState& s : samples) {
    ConvexPolygon fp = vehicle_footprint(s, params);
    if (!footprint_in_workspace(fp, env.scenario->workspace)) return std::nullopt;
    footprints.push_back(std::move(fp));
  }

  std::map<int, DecisionAction> decisions;
  for (const PlannerEnv::ObstacleRef& ref : env.obstacles) {
    const double broad = body_radius + ref.circumradius + cfg.collision_margin;
    bool overlapped = false;
    for (size_t k = 0; k < samples.size() && !overlapped; ++k) {
      if (distance(samples[k].position(), ref.centroid) > broad) continue;
      if (polygon_distance(footprints[k], env.scenario->statics[ref.index].shape) <=
          cfg.collision_margin)
        overlapped = true;
    }
    if (!overlapped) continue;
    if (mode == MotionMode::ZeroTurn) return std::nullopt;  // never spin over an obstacle

    const StaticObstacle& obs = env.scenario->statics[ref.index];
    switch (ref.kind) {
      case ObstacleKind::NonTraversable:
        return std::nullopt;
      case ObstacleKind::Crossable:
        if (cfg.enable_crossable && f_crossable(samples, obs, params, cfg)) {
          decisions[ref.index] = DecisionAction::Cross;
        } else {
          return std::nullopt;
        }
        break;
      case ObstacleKind::DriveOver: {
        if (cfg.enable_crossable && f_crossable(samples, obs, params, cfg)) {
          decisions[ref.index] = DecisionAction::Cross;
          break;
        }
        if (!cfg.enable_drive_over) return std::nullopt;
        // The speed window enforced downstream needs steady forward motion
        // over the pad: reversing or changing direction on it leaves the
        // optimization no feasible velocity profile.
        bool has_forward = false, has_reverse = false;
        for (size_t k = 0; k < samples.size(); ++k) {
          if (distance(samples[k].position(), ref.centroid) > broad) continue;
          if (polygon_distance(footprints[k], obs.shape) > cfg.collision_margin) continue;
          (samples[k].v >= 0.0 ? has_forward : has_reverse) = true;
        }
        if (has_reverse || !has_forward) return std::nullopt;
        decisions[ref.index] = DecisionAction::DriveOver;
        break;
      }
    }
  }
  return decisions;
}

double heuristic_cost(const VehicleState& s, const Pose2& goal, const PlannerEnv& env,
                      const std::vector<double>& distance_field) {
  const double radius = env.params.min_turn_radius();
  const double rs = reeds_shepp_shortest(s.pose(), goal, radius).length(radius);
  int ix, iy;
  env.grid.cell_of(s.position(), ix, iy);
  double grid_dist = distance_field[static_cast<size_t>(iy) * env.grid.nx + ix];
  if (!std::isfinite(grid_dist)) grid_dist = distance(s.position(), goal.position());
  return std::max(rs, grid_dist);
}

std::optional<ConnectResult> traj_connect(const Pose2& a, const Pose2& b, const PlannerEnv& env) {
  ConnectResult res;
  if (distance(a.position(), b.position()) < 1e-9 &&
      std::abs(angle_diff(a.theta, b.theta)) < 1e-9) {
    VehicleState s;
    s.x = a.x;
    s.y = a.y;
    s.theta = a.theta;
    res.samples.push_back(s);
    res.length = 0.0;
    auto handled = obstacle_handling(res.samples, MotionMode::Ackermann, env);
    if (!handled) return std::nullopt;
    res.decisions = std::move(*handled);
    return res;
  }

  const double radius = env.params.min_turn_radius();
  const ReedsSheppPath path = reeds_shepp_shortest(a, b, radius);
  const std::vector<RSSample> rs = reeds_shepp_discretize(a, path, radius, env.cfg.sample_ds);
  res.samples.reserve(rs.size());
  for (const RSSample& p : rs) {
    VehicleState s;
    s.x = p.pose.x;
    s.y = p.pose.y;
    s.theta = p.pose.theta;
    s.v = p.direction * env.cfg.nominal_speed;
    s.delta = std::atan(p.kappa * env.params.wheelbase / 2.0);
    res.samples.push_back(s);
  }
  res.length = path.length(radius);
  auto handled = obstacle_handling(res.samples, MotionMode::Ackermann, env);
  if (!handled) return std::nullopt;
  res.decisions = std::move(*handled);
  return res;
}

namespace {

struct Node {
  VehicleState state;
  MotionMode mode = MotionMode::Ackermann;
  int parent = -1;
  double g = 0.0;
  std::vector<VehicleState> seg;  // samples from parent to this node, both ends included
  std::map<int, DecisionAction> seg_decisions;
};

struct QueueEntry {
  double f;
  double g;
  uint64_t order;
  int node;
  bool operator>(const QueueEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g > o.g;
    return order > o.order;
  }
};

// Primitive displacements are precomputed once in the body frame; the
// heading sequence of the integration does not depend on the world pose,
// so rotating the cached samples reproduces the world-frame integration.
struct PrimitiveCache {
  MotionPrimitive action;
  std::vector<VehicleState> body;  // integrated from the origin pose
};

std::vector<PrimitiveCache> build_primitive_cache(const PlannerEnv& env) {
  std::vector<PrimitiveCache> cache;
  for (const MotionPrimitive& a : default_motion_set(env.params)) {
    PrimitiveCache c;
    c.action = a;
    c.body = integrate_primitive(VehicleState{}, a, env.params, env.cfg.sample_ds,
                                 env.cfg.integration_step);
    cache.push_back(std::move(c));
  }
  return cache;
}

std::vector<VehicleState> place_primitive(const PrimitiveCache& cache, const VehicleState& from) {
  const double c = std::cos(from.theta), s = std::sin(from.theta);
  std::vector<VehicleState> out = cache.body;
  for (VehicleState& st : out) {
    const double bx = st.x, by = st.y;
    st.x = from.x + bx * c - by * s;
    st.y = from.y + bx * s + by * c;
    st.theta = normalize_angle(st.theta + from.theta);
    if (cache.action.mode == MotionMode::ZeroTurn) st.delta = from.delta;
  }
  return out;
}

class Search {
 public:
  Search(const PlannerEnv& env, const Pose2& goal)
      : env_(env), goal_(goal), primitives_(build_primitive_cache(env)) {
    distance_field_ = dijkstra_distance_field(env.grid, goal.position());
  }

  double heuristic(const VehicleState& s) const {
    return heuristic_cost(s, goal_, env_, distance_field_);
  }

  uint64_t bin_key(const VehicleState& s, MotionMode mode) const {
    const int ix =
        static_cast<int>(std::floor((s.x - env_.grid.workspace.xmin) / env_.cfg.xy_bin));
    const int iy =
        static_cast<int>(std::floor((s.y - env_.grid.workspace.ymin) / env_.cfg.xy_bin));
    const int nbins = static_cast<int>(std::ceil(2.0 * M_PI / env_.cfg.theta_bin));
    int it = static_cast<int>(std::floor((s.theta + M_PI) / env_.cfg.theta_bin));
    it = ((it % nbins) + nbins) % nbins;
    return (static_cast<uint64_t>(static_cast<uint32_t>(ix)) << 40) ^
           (static_cast<uint64_t>(static_cast<uint32_t>(iy)) << 16) ^
           (static_cast<uint64_t>(it) << 4) ^ static_cast<uint64_t>(mode);
  }

  const PlannerEnv& env_;
  Pose2 goal_;
  std::vector<PrimitiveCache> primitives_;
  std::vector<double> distance_field_;
};

// Decisions attached to each output sample: obstacles the footprint touches
// at that sample, resolved per the segment's decision map.
void annotate(CoarsePath& path, const PlannerEnv& env,
              const std::vector<std::map<int, DecisionAction>>& maps,
              const std::vector<std::pair<size_t, size_t>>& ranges) {
  const double body_radius = env.params.circumscribed_radius();
  for (size_t seg = 0; seg < ranges.size(); ++seg) {
    for (size_t k = ranges[seg].first; k < ranges[seg].second; ++k) {
      CoarseState& cs = path.states[k];
      const ConvexPolygon fp = vehicle_footprint(cs.state, env.params);
      for (const auto& [obs_index, action] : maps[seg]) {
        const PlannerEnv::ObstacleRef& ref = env.obstacles[obs_index];
        if (distance(cs.state.position(), ref.centroid) >
            body_radius + ref.circumradius + env.cfg.collision_margin)
          continue;
        if (polygon_distance(fp, env.scenario->statics[obs_index].shape) <=
            env.cfg.collision_margin) {
          cs.decisions.push_back({obs_index, action});
        }
      }
    }
  }
}

CoarsePath assemble(const std::vector<Node>& arena, int leaf, const ConnectResult* conn,
                    const PlannerEnv& env) {
  std::vector<int> chain;
  for (int i = leaf; i != -1; i = arena[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  CoarsePath path;
  std::vector<std::map<int, DecisionAction>> maps;
  std::vector<std::pair<size_t, size_t>> ranges;
  for (int idx : chain) {
    const Node& node = arena[idx];
    const size_t begin = path.states.size();
    const size_t skip = (node.parent == -1) ? 0 : 1;  // drop duplicated join sample
    for (size_t k = skip; k < node.seg.size(); ++k) {
      path.states.push_back({node.seg[k], node.mode, {}});
    }
    maps.push_back(node.seg_decisions);
    ranges.emplace_back(begin, path.states.size());
  }
  if (conn != nullptr) {
    const size_t begin = path.states.size();
    for (size_t k = conn->samples.empty() || path.states.empty() ? 0 : 1; k < conn->samples.size();
         ++k) {
      path.states.push_back({conn->samples[k], MotionMode::Ackermann, {}});
    }
    maps.push_back(conn->decisions);
    ranges.emplace_back(begin, path.states.size());
  }
  annotate(path, env, maps, ranges);
  return path;
}

}  // namespace

std::optional<CoarsePath> fourwis_hybrid_astar(const VehicleState& start, const VehicleState& goal,
                                               const PlannerEnv& env) {
  std::vector<Node> arena;
  Node root;
  root.state = start;
  root.mode = MotionMode::Ackermann;
  root.seg = {start};
  arena.push_back(root);

  // Direct analytic connection first, mirroring the guided variant's
  // shortcut; covers the start == goal case exactly and skips the search
  // setup entirely on open maps.
  if (auto conn = traj_connect(start.pose(), goal.pose(), env)) {
    return assemble(arena, 0, &*conn, env);
  }

  Search search(env, goal.pose());
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  std::unordered_set<uint64_t> closed;
  uint64_t order = 0;
  open.push({search.heuristic(start), 0.0, order++, 0});

  int iterations = 1;
  while (!open.empty() && iterations <= env.cfg.max_iterations_direct) {
    const QueueEntry top = open.top();
    open.pop();
    const uint64_t key = search.bin_key(arena[top.node].state, arena[top.node].mode);
    if (closed.count(key)) continue;
    closed.insert(key);

    const Node parent = arena[top.node];
    for (const PrimitiveCache& prim : search.primitives_) {
      std::vector<VehicleState> seg = place_primitive(prim, parent.state);
      const VehicleState& child_state = seg.back();
      if (closed.count(search.bin_key(child_state, prim.action.mode))) continue;
      auto handled = obstacle_handling(seg, prim.action.mode, env);
      if (!handled) continue;

      Node child;
      child.state = child_state;
      child.mode = prim.action.mode;
      child.parent = top.node;
      child.g = parent.g + node_step_cost(parent.state, child_state, prim.action.mode,
                                          env.cfg.weights);
      if (parent.mode != prim.action.mode) {
        child.g += mode_switch_cost(parent.mode, parent.state, prim.action.mode, child_state,
                                    env.cfg.weights);
      }
      child.seg = std::move(seg);
      child.seg_decisions = std::move(*handled);
      arena.push_back(std::move(child));
      const int child_idx = static_cast<int>(arena.size()) - 1;
      open.push({arena[child_idx].g + search.heuristic(child_state), arena[child_idx].g, order++,
                 child_idx});

      if (auto conn = traj_connect(child_state.pose(), goal.pose(), env)) {
        return assemble(arena, child_idx, &*conn, env);
      }
    }
    ++iterations;
  }
  return std::nullopt;
}

std::optional<SegmentResult> improved_hybrid_astar(int i, const std::vector<Pose2>& key_points,
                                                   const PlannerEnv& env) {
  const int n_q = static_cast<int>(key_points.size());
  if (i < 0 || i + 1 >= n_q) return std::nullopt;

  if (auto conn = traj_connect(key_points[i], key_points[i + 1], env)) {
    std::vector<Node> arena(1);
    arena[0].state.x = key_points[i].x;
    arena[0].state.y = key_points[i].y;
    arena[0].state.theta = key_points[i].theta;
    arena[0].seg = {arena[0].state};
    SegmentResult res{assemble(arena, 0, &*conn, env), i + 1};
    return res;
  }

  Search search(env, key_points[i + 1]);
  std::vector<Node> arena;
  Node root;
  root.state.x = key_points[i].x;
  root.state.y = key_points[i].y;
  root.state.theta = key_points[i].theta;
  root.seg = {root.state};
  arena.push_back(root);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  std::unordered_set<uint64_t> closed;
  uint64_t order = 0;
  open.push({search.heuristic(root.state), 0.0, order++, 0});

  int iterations = 1;
  while (!open.empty() && iterations <= env.cfg.max_iterations_guided) {
    const QueueEntry top = open.top();
    open.pop();
    const uint64_t key = search.bin_key(arena[top.node].state, arena[top.node].mode);
    if (closed.count(key)) continue;
    closed.insert(key);

    const Node parent = arena[top.node];
    for (const PrimitiveCache& prim : search.primitives_) {
      std::vector<VehicleState> seg = place_primitive(prim, parent.state);
      const VehicleState& child_state = seg.back();
      if (closed.count(search.bin_key(child_state, prim.action.mode))) continue;
      auto handled = obstacle_handling(seg, prim.action.mode, env);
      if (!handled) continue;

      Node child;
      child.state = child_state;
      child.mode = prim.action.mode;
      child.parent = top.node;
      child.g = parent.g + node_step_cost(parent.state, child_state, prim.action.mode,
                                          env.cfg.weights);
      if (parent.mode != prim.action.mode) {
        child.g += mode_switch_cost(parent.mode, parent.state, prim.action.mode, child_state,
                                    env.cfg.weights);
      }
      child.seg = std::move(seg);
      child.seg_decisions = std::move(*handled);
      arena.push_back(std::move(child));
      const int child_idx = static_cast<int>(arena.size()) - 1;
      open.push({arena[child_idx].g + search.heuristic(child_state), arena[child_idx].g, order++,
                 child_idx});

      // Scan downstream key points farthest-first.
      for (int m = n_q - 1; m >= i + 1; --m) {
        if (auto conn = traj_connect(child_state.pose(), key_points[m], env)) {
          SegmentResult res{assemble(arena, child_idx, &*conn, env), m};
          return res;
        }
      }
    }
    ++iterations;
  }
  return std::nullopt;
}

InitialPathResult initial_path(const Scenario& s, const VehicleParams& params,
                               const PlannerConfig& cfg, PolicyOverride policy,
                               const std::function<bool()>& classify_hard) {
  InitialPathResult result;
  bool hard;
  switch (policy) {
    case PolicyOverride::ForceHard: hard = true; break;
    case PolicyOverride::ForceEasy: hard = false; break;
    case PolicyOverride::Auto:
    default:
      hard = classify_hard ? classify_hard() : false;
      break;
  }

  PlannerEnv env(s, params, cfg);
  if (!hard) {
    result.path = fourwis_hybrid_astar(s.init, s.goal, env);
    if (!result.path) result.failure = "search";
    return result;
  }

  result.used_guided = true;
  std::optional<KeyPointSet> kps = generate_guided_points(s, params, cfg.grid_resolution);
  if (!kps) {
    result.failure = "guided-points";
    return result;
  }
  std::vector<Pose2> q;
  q.reserve(kps->points.size());
  for (const GuidedPoint& g : kps->points) q.push_back({g.x, g.y, g.theta});

  CoarsePath total;
  int i = 0;
  while (i + 1 < static_cast<int>(q.size())) {
    std::optional<SegmentResult> seg = improved_hybrid_astar(i, q, env);
    if (!seg) {
      result.failure = "segment-search";
      return result;
    }
    const size_t skip = total.states.empty() ? 0 : 1;
    for (size_t k = skip; k < seg->path.states.size(); ++k) {
      total.states.push_back(seg->path.states[k]);
    }
    i = seg->reached;
  }
  result.path = std::move(total);
  return result;
}

void save_coarse_path(const CoarsePath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_coarse_path: cannot open " + file);
  out << "index\tx\ty\ttheta\tv\tdelta\tmode\tdecisions\n";
  char buf[256];
  for (size_t k = 0; k < path.states.size(); ++k) {
    const CoarseState& cs = path.states[k];
    std::snprintf(buf, sizeof(buf), "%zu\t%.9f\t%.9f\t%.9f\t%.9f\t%.9f\t%s\t", k, cs.state.x,
                  cs.state.y, cs.state.theta, cs.state.v, cs.state.delta, mode_name(cs.mode));
    out << buf;
    if (cs.decisions.empty()) {
      out << "-";
    } else {
      for (size_t d = 0; d < cs.decisions.size(); ++d) {
        if (d > 0) out << ";";
        out << (cs.decisions[d].action == DecisionAction::Cross ? "cross:" : "driveover:")
            << cs.decisions[d].obstacle;
      }
    }
    out << "\n";
  }
}

}  // namespace fwis
