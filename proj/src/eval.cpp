#include "fwis/eval.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fwis {

PipelineResult run_pipeline(const Scenario& s, const VehicleParams& params, const RunConfig& cfg,
                            const MlpModel* model) {
  PipelineResult result;

  PlannerConfig pcfg;
  pcfg.enable_crossable = cfg.crossable;
  pcfg.enable_drive_over = cfg.drive_over;

  PolicyOverride policy;
  std::function<bool()> classify;
  if (!cfg.use_guided) {
    policy = PolicyOverride::ForceEasy;
  } else {
    switch (cfg.classifier) {
      case ClassifierMode::ForceHard: policy = PolicyOverride::ForceHard; break;
      case ClassifierMode::ForceEasy: policy = PolicyOverride::ForceEasy; break;
      case ClassifierMode::Off: policy = PolicyOverride::ForceHard; break;
      case ClassifierMode::On:
      default:
        if (model == nullptr) throw std::runtime_error("run_pipeline: classifier requires a model");
        policy = PolicyOverride::Auto;
        classify = [&]() {
          const SceneImage img = rasterize_scene(s, 200, 200, params);
          return forward(*model, img, s.init, s.goal, s.workspace).hard;
        };
        break;
    }
  }

  const double t0 = omp_get_wtime();
  const InitialPathResult planned = initial_path(s, params, pcfg, policy, classify);
  result.used_guided = planned.used_guided;
  if (!planned.path) {
    result.failure = "search-failure";
    result.computation_time = omp_get_wtime() - t0;
    return result;
  }
  result.coarse = *planned.path;

  OcpBuildConfig bcfg;
  bcfg.use_risk_corridors = cfg.risk_corridor;
  const BuildOutcome built = build_problem(result.coarse, s, params, bcfg);
  if (!built.problem) {
    result.failure = "corridor-failure";
    result.computation_time = omp_get_wtime() - t0;
    return result;
  }
  for (const CorridorBounds& b : built.problem->corridors) {
    DrivingCorridor c;
    c.center = {0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)};
    c.l_left = c.l_right = 0.5 * (b.xmax - b.xmin);
    c.l_down = c.l_up = 0.5 * (b.ymax - b.ymin);
    result.corridors.push_back(c);
  }

  const SolveOutcome solved = solve(*built.problem);
  result.computation_time = omp_get_wtime() - t0;
  if (!solved.trajectory) {
    result.failure = "solver-infeasible";
    return result;
  }

  // Success means completed without collision: sweep the optimized
  // footprint against every blocking obstacle.
  const Trajectory& traj = *solved.trajectory;
  const std::vector<ConvexPolygon> blocking = s.shapes_of(ObstacleKind::NonTraversable);
  for (int j = 0; j < traj.n; ++j) {
    for (int sub = 0; sub < 4; ++sub) {
      const double f = sub / 4.0;
      VehicleState st;
      st.x = traj.x[j] + f * (traj.x[j + 1] - traj.x[j]);
      st.y = traj.y[j] + f * (traj.y[j + 1] - traj.y[j]);
      st.theta = traj.theta[j] + f * (traj.theta[j + 1] - traj.theta[j]);
      const ConvexPolygon fp = vehicle_footprint(st, params);
      for (const ConvexPolygon& obs : blocking) {
        if (polygons_intersect(fp, obs)) {
          result.failure = "collision";
          return result;
        }
      }
    }
  }
  result.trajectory = solved.trajectory;
  return result;
}

int EvaluationReport::successes() const {
  int n = 0;
  for (const ScenarioRow& r : rows) n += r.success ? 1 : 0;
  return n;
}

double EvaluationReport::success_rate() const {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(successes()) / rows.size();
}

double EvaluationReport::mean_over_successes(double ScenarioRow::*field) const {
  double sum = 0.0;
  int n = 0;
  for (const ScenarioRow& r : rows) {
    if (!r.success) continue;
    sum += r.*field;
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

EvaluationReport evaluate_batch(const std::vector<Scenario>& scenarios,
                                const VehicleParams& params, const RunConfig& cfg,
                                const MlpModel* model) {
  EvaluationReport report;
  report.rows.resize(scenarios.size());
  const int workers = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    ScenarioRow row;
    row.seed = s.seed;
    PipelineResult r = run_pipeline(s, params, cfg, model);
    row.computation_time = r.computation_time;
    row.used_guided = r.used_guided;
    if (r.trajectory) {
      row.success = true;
      const PathMetrics pm = path_metrics(*r.trajectory);
      const JerkMetrics jm = jerk_metrics(*r.trajectory);
      row.path_length = pm.length;
      row.traversal_time = pm.traversal_time;
      row.max_jerk = jm.max_jerk;
      row.avg_jerk = jm.avg_jerk;
      std::vector<Point2> pos(r.trajectory->n + 1), vel(r.trajectory->n + 1);
      const double dt = r.trajectory->dt();
      for (int j = 0; j <= r.trajectory->n; ++j) {
        pos[j] = r.trajectory->position(j);
        const int j2 = std::min(j + 1, r.trajectory->n);
        vel[j] = {(r.trajectory->x[j2] - r.trajectory->x[j2 - 1]) / dt,
                  (r.trajectory->y[j2] - r.trajectory->y[j2 - 1]) / dt};
      }
      row.crp = cumulative_risk_potential(pos, vel, s.pedestrians, dt, RiskFieldParams{});
      row.min_ped_distance = min_pedestrian_distance(*r.trajectory, s.pedestrians);
    } else {
      row.failure = r.failure;
    }
    report.rows[i] = row;
  }
  return report;
}

void save_report(const EvaluationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_report: cannot open " + path);
  out << "seed\tsuccess\tfailure\tguided\tpath_length\ttraversal_time\tcomputation_time\t"
         "max_jerk\tavg_jerk\tcrp\tmin_ped_distance\n";
  char buf[256];
  for (const ScenarioRow& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%llu\t%d\t%s\t%d\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n",
                  static_cast<unsigned long long>(r.seed), r.success ? 1 : 0,
                  r.failure.empty() ? "-" : r.failure.c_str(), r.used_guided ? 1 : 0,
                  r.path_length, r.traversal_time, r.computation_time, r.max_jerk, r.avg_jerk,
                  r.crp, r.min_ped_distance);
    out << buf;
  }
  out << "# aggregate\n";
  if (report.rows.empty()) {
    out << "success_rate\tn/a\n";
    return;
  }
  std::snprintf(buf, sizeof(buf), "success_rate\t%.4f\n", report.success_rate());
  out << buf;
  const auto put_mean = [&](const char* name, double ScenarioRow::*field) {
    std::snprintf(buf, sizeof(buf), "mean_%s\t%.6f\n", name,
                  report.mean_over_successes(field));
    out << buf;
  };
  put_mean("path_length", &ScenarioRow::path_length);
  put_mean("traversal_time", &ScenarioRow::traversal_time);
  put_mean("computation_time", &ScenarioRow::computation_time);
  put_mean("max_jerk", &ScenarioRow::max_jerk);
  put_mean("avg_jerk", &ScenarioRow::avg_jerk);
  put_mean("crp", &ScenarioRow::crp);
  put_mean("min_ped_distance", &ScenarioRow::min_ped_distance);
}

}  // namespace fwis
