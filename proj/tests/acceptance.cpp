// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Each criterion pins its tolerances in code.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "fwis/classifier.hpp"
#include "fwis/corridor.hpp"
#include "fwis/eval.hpp"
#include "fwis/guided_points.hpp"
#include "fwis/metrics.hpp"
#include "fwis/ocp.hpp"
#include "fwis/planner.hpp"
#include "fwis/scenario.hpp"
#include "oracles.hpp"

using namespace fwis;

namespace {

struct Criterion {
  int id;
  bool pass = false;
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, bool pass, const std::string& detail) {
  g_results.push_back({id, pass, detail});
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

StaticObstacle rect_obstacle(double x0, double y0, double x1, double y1, ObstacleKind kind,
                             double height) {
  StaticObstacle o;
  o.shape.vertices = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  o.attribute = {kind, height};
  return o;
}

VehicleState make_state(double x, double y, double theta) {
  VehicleState s;
  s.x = x;
  s.y = y;
  s.theta = theta;
  return s;
}

// --------------------------------------------------------------- criterion 1
void criterion_kinematics() {
  const VehicleParams vp;
  const double t0 = omp_get_wtime();
  Rng rng(811);
  double worst_pos = 0.0, worst_ang = 0.0;
  const MotionMode modes[3] = {MotionMode::Ackermann, MotionMode::Diagonal, MotionMode::ZeroTurn};
  for (MotionMode mode : modes) {
    for (int i = 0; i < 1000; ++i) {
      VehicleState from = make_state(rng.uniform(-10, 10), rng.uniform(-10, 10),
                                     rng.uniform(-M_PI, M_PI));
      from.delta = rng.uniform(-vp.max_steer, vp.max_steer);
      MotionPrimitive a;
      a.mode = mode;
      a.direction = rng.unit() < 0.5 ? 1.0 : -1.0;
      switch (mode) {
        case MotionMode::Ackermann:
          a.steer = rng.uniform(-vp.max_steer, vp.max_steer);
          a.amount = rng.uniform(0.2, 2.0);
          break;
        case MotionMode::Diagonal:
          a.steer = rng.uniform(-M_PI / 2, M_PI / 2);
          a.amount = rng.uniform(0.2, 2.0);
          break;
        case MotionMode::ZeroTurn:
          a.steer = 0.0;
          a.amount = rng.uniform(0.05, M_PI / 2);
          break;
      }
      const VehicleState mine = expand_state(from, a, vp);
      const VehicleState ref =
          oracle::euler_kinematics(from, a.mode, a.direction, a.steer, a.amount, vp);
      worst_pos = std::max(worst_pos, std::hypot(mine.x - ref.x, mine.y - ref.y));
      worst_ang = std::max(worst_ang, std::abs(angle_diff(mine.theta, ref.theta)));
    }
  }
  const double elapsed = omp_get_wtime() - t0;
  const bool pass = worst_pos < 1e-5 && worst_ang < 1e-6 && elapsed < 5.0;
  report(1, pass,
         fmt("kinematic fidelity: max position error %.2e m (tol 1e-5), max heading error %.2e "
             "rad (tol 1e-6), %.1f s (cap 5 s)",
             worst_pos, worst_ang, elapsed));
}

// --------------------------------------------------------------- criterion 2
void criterion_visible_points() {
  const VehicleParams vp;
  const double t0 = omp_get_wtime();
  int paths = 0, equal = 0;
  uint64_t seed = 1000;
  while (paths < 100) {
    const Scenario s = generate_scenario(seed, 3 + static_cast<int>(seed % 7), vp);
    ++seed;
    const auto path = astar_grid(s, vp, 0.5);
    if (!path || path->waypoints.size() < 2) continue;
    ++paths;
    const auto blocking = s.shapes_of(ObstacleKind::NonTraversable);
    const auto mine = consecutive_farthest_visible(path->waypoints, blocking);
    const auto ref = oracle::farthest_visible_scan(path->waypoints, blocking);
    bool same = mine.size() == ref.size();
    for (size_t i = 0; same && i < mine.size(); ++i) {
      same = mine[i].x == ref[i].x && mine[i].y == ref[i].y;
    }
    equal += same ? 1 : 0;
  }
  const double elapsed = omp_get_wtime() - t0;
  const bool pass = equal == 100 && elapsed < 10.0;
  report(2, pass,
         fmt("visible-point reduction: %d/100 paths equal the scan oracle exactly, %.1f s (cap "
             "10 s)",
             equal, elapsed));
}

// --------------------------------------------------------------- criterion 3
void criterion_reeds_shepp() {
  const VehicleParams vp;
  const double t0 = omp_get_wtime();
  Scenario open;
  open.init = make_state(10, 10, 0);
  open.goal = make_state(30, 30, 0);
  PlannerEnv env(open, vp, PlannerConfig{});
  const double radius = vp.min_turn_radius();

  Rng rng(833);
  int ok = 0, connected = 0;
  double worst_gap = -1e9;
  for (int i = 0; i < 500; ++i) {
    const Pose2 a{rng.uniform(12, 28), rng.uniform(12, 28), rng.uniform(-M_PI, M_PI)};
    const Pose2 b{rng.uniform(12, 28), rng.uniform(12, 28), rng.uniform(-M_PI, M_PI)};
    const auto conn = traj_connect(a, b, env);
    if (!conn) continue;
    ++connected;
    const double ref = oracle::rs48::shortest_length(a, b, radius);
    worst_gap = std::max(worst_gap, conn->length - ref);
    if (conn->length <= ref + 1e-6) ++ok;
  }
  const double elapsed = omp_get_wtime() - t0;
  const bool pass = connected == 500 && ok == 500 && elapsed < 30.0;
  report(3, pass,
         fmt("analytic connection optimality: %d/500 within 1e-6 of the 48-word enumeration "
             "(worst gap %.2e m), %.1f s (cap 30 s)",
             ok, worst_gap, elapsed));
}

// --------------------------------------------------------------- criterion 4
void criterion_corridor_safety() {
  const VehicleParams vp;
  GenerationConfig gen;
  gen.min_pedestrians = 1;
  const RiskFieldParams rp;

  int checked = 0, box_violations = 0, risk_violations = 0;
  uint64_t seed = 1200;
  int scenarios_used = 0;
  while (scenarios_used < 50 && seed < 1400) {
    const Scenario s = generate_scenario(seed++, 5, vp, gen);
    const InitialPathResult planned =
        initial_path(s, vp, PlannerConfig{}, PolicyOverride::ForceEasy);
    if (!planned.path) continue;
    OcpBuildConfig bcfg;
    const BuildOutcome built = build_problem(*planned.path, s, vp, bcfg);
    if (!built.problem) continue;
    ++scenarios_used;

    const OcpProblem& p = *built.problem;
    const double dt = p.warm.dt();
    const auto blocking = s.shapes_of(ObstacleKind::NonTraversable);
    for (int j = 0; j <= p.n; ++j) {
      const CorridorBounds& b = p.corridors[j];
      ++checked;
      // 1000-point interior sampling against every blocking obstacle.
      bool violated = false;
      for (int u = 0; u < 25 && !violated; ++u) {
        for (int v = 0; v < 40 && !violated; ++v) {
          const Point2 pt{b.xmin + (b.xmax - b.xmin) * (u + 0.5) / 25.0,
                          b.ymin + (b.ymax - b.ymin) * (v + 0.5) / 40.0};
          for (const ConvexPolygon& obs : blocking) {
            if (obs.contains(pt)) {
              violated = true;
              break;
            }
          }
        }
      }
      if (violated) ++box_violations;

      // Post-shrink boundary risk at M samples per edge.
      if (!s.pedestrians.empty()) {
        const int j2 = std::min(j + 1, p.n);
        const Point2 vel{(p.warm.x[j2] - p.warm.x[j2 - 1]) / dt,
                         (p.warm.y[j2] - p.warm.y[j2 - 1]) / dt};
        for (int edge = 0; edge < 4; ++edge) {
          const bool horizontal = edge == 0 || edge == 2;
          const double len = horizontal ? b.xmax - b.xmin : b.ymax - b.ymin;
          const int samples = edge_sample_count(len, rp);
          for (int m = 0; m < samples; ++m) {
            const double t = static_cast<double>(m) / (samples - 1);
            Point2 pt;
            switch (edge) {
              case 0: pt = {b.xmin + t * (b.xmax - b.xmin), b.ymax}; break;
              case 1: pt = {b.xmax, b.ymin + t * (b.ymax - b.ymin)}; break;
              case 2: pt = {b.xmin + t * (b.xmax - b.xmin), b.ymin}; break;
              default: pt = {b.xmin, b.ymin + t * (b.ymax - b.ymin)}; break;
            }
            if (risk_value(pt, vel, s.pedestrians, j, dt, rp) > rp.epsilon_threshold + 1e-12) {
              ++risk_violations;
            }
          }
        }
      }
    }
  }
  const bool pass = scenarios_used == 50 && box_violations == 0 && risk_violations == 0;
  report(4, pass,
         fmt("corridor safety: %d scenarios, %d boxes; %d obstacle violations, %d boundary risk "
             "violations (exact pass required)",
             scenarios_used, checked, box_violations, risk_violations));
}

// --------------------------------------------------------------- criterion 5
void criterion_ocp() {
  const VehicleParams vp;
  const double t0 = omp_get_wtime();

  int solved = 0, attempted = 0;
  bool cost_ok = true, defect_ok = true, boundary_ok = true;
  uint64_t seed = 1500;
  bool have_grad_problem = false;
  OcpProblem grad_problem;
  GenerationConfig gen;
  gen.p_nontraversable = 1.0;  // pure avoidance fixtures; traversal is criterion 8's job
  gen.max_pedestrians = 0;
  while (attempted < 20 && seed < 1600) {
    const int density = (seed % 2 == 0) ? 0 : 3;  // empty and low-density fixtures
    const Scenario s = generate_scenario(seed++, density, vp, gen);
    const InitialPathResult planned =
        initial_path(s, vp, PlannerConfig{}, PolicyOverride::ForceEasy);
    if (!planned.path) continue;
    OcpBuildConfig bcfg;
    const BuildOutcome built = build_problem(*planned.path, s, vp, bcfg);
    if (!built.problem) continue;
    ++attempted;
    if (!have_grad_problem) {
      grad_problem = *built.problem;
      have_grad_problem = true;
    }

    const double warm_cost =
        trajectory_cost(built.problem->warm, built.problem->lambda1, built.problem->lambda2);
    const SolveOutcome out = solve(*built.problem);
    if (!out.trajectory) continue;
    ++solved;
    if (out.report.cost > warm_cost + 1e-9) cost_ok = false;
    double worst = 0.0;
    for (double r : kinematic_defects(*built.problem, *out.trajectory)) {
      worst = std::max(worst, std::abs(r));
    }
    if (worst >= 1e-4) defect_ok = false;
    const Trajectory& t = *out.trajectory;
    const OcpProblem& p = *built.problem;
    const double be = std::max(
        {std::abs(t.x[0] - p.s0.x), std::abs(t.y[0] - p.s0.y), std::abs(t.v[0] - p.s0.v),
         std::abs(t.theta[0] - p.s0.theta), std::abs(t.delta[0] - p.s0.delta),
         std::abs(t.x[p.n] - p.sf.x), std::abs(t.y[p.n] - p.sf.y), std::abs(t.v[p.n] - p.sf.v),
         std::abs(t.theta[p.n] - p.sf.theta), std::abs(t.delta[p.n] - p.sf.delta)});
    if (be >= 1e-4) boundary_ok = false;
  }

  // Full-Lagrangian analytic gradient vs central differences.
  int grad_checked = 0, grad_ok = 0;
  if (have_grad_problem) {
    OcpEvaluator ev(grad_problem);
    Eigen::VectorXd z = ev.pack(grad_problem.warm);
    ev.refresh_logical(z);
    Rng rng(17);
    for (long i = 0; i < z.size(); ++i) z[i] += rng.uniform(-0.01, 0.01);
    Eigen::VectorXd lam_eq(ev.eq_count()), lam_ineq(ev.ineq_count());
    for (long i = 0; i < lam_eq.size(); ++i) lam_eq[i] = rng.uniform(-0.5, 0.5);
    for (long i = 0; i < lam_ineq.size(); ++i) lam_ineq[i] = rng.uniform(0.0, 0.5);
    Eigen::VectorXd grad;
    ev.augmented(z, lam_eq, lam_ineq, 9.0, &grad);
    const double eps = 1e-6;
    int guard = 0;
    while (grad_checked < 50 && guard++ < 500) {
      const long i = static_cast<long>(rng.eng() % static_cast<uint64_t>(z.size()));
      Eigen::VectorXd zp = z, zm = z;
      zp[i] += eps;
      zm[i] -= eps;
      const double fd = (ev.augmented(zp, lam_eq, lam_ineq, 9.0, nullptr) -
                         ev.augmented(zm, lam_eq, lam_ineq, 9.0, nullptr)) /
                        (2.0 * eps);
      if (std::abs(fd) < 1e-9 && std::abs(grad[i]) < 1e-9) continue;
      ++grad_checked;
      if (std::abs(grad[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd))) ++grad_ok;
    }
  }
  const double elapsed = omp_get_wtime() - t0;
  const bool pass = attempted == 20 && solved == 20 && cost_ok && defect_ok && boundary_ok &&
                    grad_checked == 50 && grad_ok == 50 && elapsed < 300.0;
  report(5, pass,
         fmt("trajectory optimization: %d/%d fixtures feasible (defect<1e-4, boundary<1e-4, "
             "cost<=warm: %s), gradients %d/%d within 1e-4, %.1f s (cap 300 s)",
             solved, attempted, (cost_ok && defect_ok && boundary_ok) ? "yes" : "no", grad_ok,
             grad_checked, elapsed));
}

// ------------------------------------------------------- criteria 10 then 6
MlpModel g_trained_model;
bool g_model_ready = false;

void criterion_classifier() {
  const VehicleParams vp;
  const double t0 = omp_get_wtime();

  std::vector<Scenario> corpus;
  for (uint64_t seed = 2000; seed < 2700; ++seed) {
    corpus.push_back(generate_scenario(seed, static_cast<int>(seed % 16), vp));
  }
  const auto labeled = label_dataset(corpus, vp);
  std::vector<SampleFeatures> features;
  int hard_count = 0;
  for (const LabeledScenario& l : labeled) {
    if (l.dropped) continue;
    const SceneImage img = rasterize_scene(l.scenario, 200, 200, vp);
    SampleFeatures f =
        extract_features(img, l.scenario.init, l.scenario.goal, l.scenario.workspace);
    f.label = l.hard ? 1.0 : 0.0;
    hard_count += l.hard ? 1 : 0;
    features.push_back(std::move(f));
  }

  bool acc_ok = true, loss_ok = true;
  double acc[2] = {0, 0};
  for (int run = 0; run < 2; ++run) {
    TrainConfig cfg;
    cfg.epochs = 100;
    cfg.seed = 11 + run;
    const TrainResult res = train(features, cfg);
    acc[run] = res.test_accuracy;
    if (res.test_accuracy < 0.90) acc_ok = false;
    const double train_ratio = res.history.train_loss.back() / res.history.train_loss.front();
    const double val_ratio = res.history.val_loss.back() / res.history.val_loss.front();
    if (train_ratio > 0.20 || val_ratio > 0.20) loss_ok = false;
    if (run == 0) {
      g_trained_model = res.model;
      g_model_ready = true;
    }
  }
  const double elapsed = omp_get_wtime() - t0;
  const bool pass = features.size() >= 200 && acc_ok && loss_ok && elapsed < 600.0;
  report(10, pass,
         fmt("classifier: %zu auto-labeled samples (%d hard), held-out accuracy %.3f / %.3f "
             "(floor 0.90), epoch-100 loss <= 20%% of epoch-1: %s, %.1f s (cap 600 s)",
             features.size(), hard_count, acc[0], acc[1], loss_ok ? "yes" : "no", elapsed));
}

void criterion_guided_ablation() {
  const VehicleParams vp;
  const double t0 = omp_get_wtime();
  std::vector<Scenario> batch;
  for (uint64_t seed = 2500; seed < 2530; ++seed) {
    batch.push_back(generate_scenario(seed, 7, vp));
  }

  RunConfig guided;
  guided.use_guided = true;
  guided.classifier = ClassifierMode::ForceHard;
  RunConfig direct;
  direct.use_guided = false;
  RunConfig gated;
  gated.use_guided = true;
  gated.classifier = ClassifierMode::On;

  const EvaluationReport rg = evaluate_batch(batch, vp, guided, nullptr);
  const EvaluationReport rd = evaluate_batch(batch, vp, direct, nullptr);
  EvaluationReport rc;
  if (g_model_ready) rc = evaluate_batch(batch, vp, gated, &g_trained_model);

  const double tg = rg.mean_over_successes(&ScenarioRow::computation_time);
  const double td = rd.mean_over_successes(&ScenarioRow::computation_time);
  const double tc = rc.mean_over_successes(&ScenarioRow::computation_time);
  const double better = std::min(tg, td);
  const double elapsed = omp_get_wtime() - t0;
  const bool pass = g_model_ready && rg.success_rate() >= rd.success_rate() &&
                    tc <= 1.1 * better && elapsed < 900.0;
  report(6, pass,
         fmt("guided-point ablation: success %.2f (guided) vs %.2f (direct); mean time %.3f s "
             "(gated) vs better fixed %.3f s (cap 1.1x), %.1f s (cap 900 s)",
             rg.success_rate(), rd.success_rate(), tc, better, elapsed));
}

// --------------------------------------------------------------- criterion 7
void criterion_crossable() {
  const VehicleParams vp;
  int with_ok = 0, without_ok = 0;
  for (int i = 0; i < 10; ++i) {
    const double gap_x = 14.0 + 1.4 * i;   // passage center
    const double half = 0.30 + 0.015 * i;  // crossable obstacle half width
    Scenario s;
    s.init = make_state(gap_x, 8, M_PI / 2);
    s.goal = make_state(gap_x, 32, M_PI / 2);
    s.statics.push_back(
        rect_obstacle(0.0, 18.0, gap_x - 1.0, 22.0, ObstacleKind::NonTraversable, 1.0));
    s.statics.push_back(
        rect_obstacle(gap_x + 1.0, 18.0, 40.0, 22.0, ObstacleKind::NonTraversable, 1.0));
    s.statics.push_back(rect_obstacle(gap_x - half, 18.5, gap_x + half, 21.5,
                                      ObstacleKind::Crossable, 0.04 + 0.01 * (i % 3)));

    PlannerConfig with_cohs;
    const InitialPathResult a = initial_path(s, vp, with_cohs, PolicyOverride::ForceEasy);
    with_ok += a.path ? 1 : 0;

    PlannerConfig without_cohs;
    without_cohs.enable_crossable = false;
    const InitialPathResult b = initial_path(s, vp, without_cohs, PolicyOverride::ForceEasy);
    without_ok += b.path ? 1 : 0;
  }
  const bool pass = with_ok >= 8 && without_ok <= 4;
  report(7, pass,
         fmt("crossable handling: %d/10 succeed with the strategy (floor 8), %d/10 without "
             "(cap 4)",
             with_ok, without_ok));
}

// --------------------------------------------------------------- criterion 8
void criterion_drive_over() {
  const VehicleParams vp;
  int traversals = 0, window_violations = 0, runs_ok = 0;
  for (int i = 0; i < 8; ++i) {
    const double pad_y = 17.0 + 0.8 * i;
    Scenario s;
    s.init = make_state(6, 20, 0);
    s.goal = make_state(34, 20, 0);
    s.statics.push_back(rect_obstacle(17.0 - 0.5 * i, pad_y, 23.0 + 0.5 * i, pad_y + 4.0,
                                      ObstacleKind::DriveOver, 0.05));
    RunConfig cfg;
    cfg.use_guided = false;
    const PipelineResult r = run_pipeline(s, vp, cfg, nullptr);
    if (!r.trajectory) continue;
    ++runs_ok;
    double xmin, ymin, xmax, ymax;
    s.statics[0].shape.bounds(xmin, ymin, xmax, ymax);
    const Trajectory& t = *r.trajectory;
    bool crossed = false;
    for (int j = 0; j <= t.n; ++j) {
      const bool chi = t.x[j] >= xmin && t.x[j] <= xmax && t.y[j] >= ymin && t.y[j] <= ymax;
      if (!chi) continue;
      crossed = true;
      if (t.v[j] < 0.5 - 1e-4 || t.v[j] > 2.0 + 1e-4) ++window_violations;
    }
    traversals += crossed ? 1 : 0;
  }
  const bool pass = traversals > 0 && window_violations == 0;
  report(8, pass,
         fmt("drive-over speed window: %d/8 runs solved, %d traversals, %d samples outside "
             "[0.5-1e-4, 2.0+1e-4] (exact pass required)",
             runs_ok, traversals, window_violations));
}

// --------------------------------------------------------------- criterion 9
void criterion_risk_ablation() {
  const VehicleParams vp;
  // Dogleg routes whose shortcut region holds a slow pedestrian: without
  // risk shrinking the optimizer cuts toward the pedestrian, with it the
  // corridors hold the clearance.
  std::vector<Scenario> batch;
  for (uint64_t seed = 2700; seed < 2720; ++seed) {
    Rng rng(seed);
    Scenario s;
    const double y0 = 20.0 + rng.uniform(-3.0, 3.0);
    const double slope = 0.70 + rng.uniform(0.0, 0.25);
    s.init = make_state(8.0 + rng.uniform(-1.5, 1.5), y0, -slope);
    s.goal = make_state(32.0 + rng.uniform(-1.5, 1.5), y0, slope);
    PedestrianTrack ped;
    ped.x0 = 0.5 * (s.init.x + s.goal.x) + rng.uniform(-1.5, 1.5);
    ped.y0 = y0 - rng.uniform(0.6, 1.4);
    ped.vx = rng.uniform(-0.1, 0.1);
    ped.vy = rng.uniform(-0.05, 0.05);
    ped.var_x = ped.var_y = 1.0;
    ped.var_vx = ped.var_vy = 0.01;
    ped.var_ax = ped.var_ay = 0.002;
    s.pedestrians.push_back(ped);
    s.seed = seed;
    batch.push_back(s);
  }
  RunConfig with_risk;
  with_risk.use_guided = false;
  RunConfig without_risk = with_risk;
  without_risk.risk_corridor = false;

  const EvaluationReport ra = evaluate_batch(batch, vp, with_risk, nullptr);
  const EvaluationReport rb = evaluate_batch(batch, vp, without_risk, nullptr);

  double crp_with = 0.0, crp_without = 0.0, dist_with = 0.0, dist_without = 0.0;
  int paired = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (!ra.rows[i].success || !rb.rows[i].success) continue;
    ++paired;
    crp_with += ra.rows[i].crp;
    crp_without += rb.rows[i].crp;
    dist_with += ra.rows[i].min_ped_distance;
    dist_without += rb.rows[i].min_ped_distance;
  }
  const bool pass = paired >= 5 && crp_with < crp_without && dist_with > dist_without;
  report(9, pass,
         fmt("risk corridor ablation: %d paired runs, mean CRP %.3f (with) vs %.3f (without), "
             "mean min distance %.3f vs %.3f",
             paired, paired ? crp_with / paired : 0.0, paired ? crp_without / paired : 0.0,
             paired ? dist_with / paired : 0.0, paired ? dist_without / paired : 0.0));
}

// -------------------------------------------------------------- criterion 11
void criterion_metric_formulas() {
  Rng rng(911);
  int checked = 0, ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 20 + static_cast<int>(rng.eng() % 180);
    Trajectory t;
    t.n = n;
    t.t_f = rng.uniform(5.0, 40.0);
    t.x.resize(n + 1);
    t.y.resize(n + 1);
    t.v.resize(n + 1);
    t.theta.assign(n + 1, 0.0);
    t.delta.assign(n + 1, 0.0);
    t.a.resize(n);
    t.omega.assign(n, 0.0);
    t.modes.assign(n, MotionMode::Ackermann);
    for (int j = 0; j <= n; ++j) {
      t.x[j] = rng.uniform(0, 40);
      t.y[j] = rng.uniform(0, 40);
      t.v[j] = rng.uniform(-2, 2);
    }
    for (int k = 0; k < n; ++k) t.a[k] = rng.uniform(-1.5, 1.5);

    std::vector<PedestrianTrack> peds;
    const int n_peds = static_cast<int>(rng.eng() % 3);
    for (int q = 0; q < n_peds; ++q) {
      PedestrianTrack p;
      p.x0 = rng.uniform(0, 40);
      p.y0 = rng.uniform(0, 40);
      p.vx = rng.uniform(-1, 1);
      p.vy = rng.uniform(-1, 1);
      p.ax = rng.uniform(-0.2, 0.2);
      p.ay = rng.uniform(-0.2, 0.2);
      p.var_x = rng.uniform(0.05, 0.3);
      p.var_y = rng.uniform(0.05, 0.3);
      p.var_vx = p.var_vy = 0.01;
      p.var_ax = p.var_ay = 0.005;
      peds.push_back(p);
    }

    // Literal transcriptions of the metric formulas.
    const double dt = t.t_f / n;
    double jerk_max = 0.0, jerk_sum = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
      const double j = std::abs(t.a[k + 1] - t.a[k]) / dt;
      jerk_max = std::max(jerk_max, j);
      jerk_sum += j;
    }
    const double jerk_avg = jerk_sum / (n - 1);
    double length = 0.0;
    for (int j = 1; j <= n; ++j) {
      length += std::hypot(t.x[j] - t.x[j - 1], t.y[j] - t.y[j - 1]);
    }

    const RiskFieldParams rp;
    double crp_ref = 0.0;
    for (const PedestrianTrack& p : peds) {
      std::vector<double> u(n + 1, 0.0);
      double peak = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double tk = k * dt;
        const double px = p.x0 + p.vx * tk + 0.5 * p.ax * tk * tk;
        const double py = p.y0 + p.vy * tk + 0.5 * p.ay * tk * tk;
        double var_x = p.var_x, var_y = p.var_y;
        for (int q = 1; q <= k; ++q) {
          var_x += dt * dt * (p.var_vx + p.var_ax * dt * dt) + p.var_ax * dt * dt * dt * dt / 4.0;
          var_y += dt * dt * (p.var_vy + p.var_ay * dt * dt) + p.var_ay * dt * dt * dt * dt / 4.0;
        }
        const double rx = t.x[k] - px, ry = t.y[k] - py;
        const double dm = std::sqrt(rx * rx / var_x + ry * ry / var_y);
        if (dm > rp.d_safe) continue;
        if (dm == 0.0) {
          u[k] = rp.risk_cap;
        } else {
          // Vehicle velocity convention matches the library: forward
          // difference of positions over dt, separation speed floored.
          const int k2 = std::min(k + 1, n);
          const double vx = (t.x[k2] - t.x[k2 - 1]) / dt;
          const double vy = (t.y[k2] - t.y[k2 - 1]) / dt;
          const double pvx = p.vx + p.ax * tk, pvy = p.vy + p.ay * tk;
          const double dist = std::hypot(rx, ry);
          const double v_r = std::max(0.0, ((vx - pvx) * rx + (vy - pvy) * ry) / dist);
          const double gap = 1.0 / dm - 1.0 / rp.d_safe;
          u[k] = rp.alpha * gap * gap * std::exp(-rp.beta * v_r);
        }
        peak = std::max(peak, u[k]);
      }
      if (peak > 0.0) {
        for (double uv : u) crp_ref += uv / peak;
      }
    }

    const JerkMetrics jm = jerk_metrics(t);
    const PathMetrics pm = path_metrics(t);
    std::vector<Point2> pos(n + 1), vel(n + 1);
    for (int j = 0; j <= n; ++j) {
      pos[j] = t.position(j);
      const int j2 = std::min(j + 1, n);
      vel[j] = {(t.x[j2] - t.x[j2 - 1]) / dt, (t.y[j2] - t.y[j2 - 1]) / dt};
    }
    const double crp = cumulative_risk_potential(pos, vel, peds, dt, rp);

    const auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    ++checked;
    if (close(jm.max_jerk, jerk_max) && close(jm.avg_jerk, jerk_avg) &&
        close(pm.length, length) && close(pm.traversal_time, t.t_f) && close(crp, crp_ref)) {
      ++ok;
    }
  }
  report(11, ok == checked,
         fmt("metric formulas: %d/%d random trajectories equal the literal transcriptions to "
             "1e-12 relative",
             ok, checked));
}

}  // namespace

int main() {
  const double t0 = omp_get_wtime();
  criterion_kinematics();
  criterion_visible_points();
  criterion_reeds_shepp();
  criterion_corridor_safety();
  criterion_ocp();
  criterion_classifier();  // also trains the model criterion 6 uses
  criterion_guided_ablation();
  criterion_crossable();
  criterion_drive_over();
  criterion_risk_ablation();
  criterion_metric_formulas();

  std::sort(g_results.begin(), g_results.end(),
            [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  bool all = true;
  int passed = 0;
  for (const Criterion& c : g_results) {
    std::printf("[%s] criterion %2d: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.detail.c_str());
    all = all && c.pass;
    passed += c.pass ? 1 : 0;
  }
  std::printf("%s (%d/%zu criteria, %.1f s total)\n",
              all ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", passed, g_results.size(),
              omp_get_wtime() - t0);
  return all ? 0 : 1;
}
