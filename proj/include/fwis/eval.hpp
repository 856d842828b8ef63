#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fwis/classifier.hpp"
#include "fwis/corridor.hpp"
#include "fwis/metrics.hpp"
#include "fwis/ocp.hpp"
#include "fwis/planner.hpp"

namespace fwis {

enum class ClassifierMode { Off, On, ForceHard, ForceEasy };

struct RunConfig {
  bool use_guided = true;  // false pins the direct search
  ClassifierMode classifier = ClassifierMode::Off;  // Off = always guided when allowed
  bool crossable = true;
  bool drive_over = true;
  bool risk_corridor = true;
  int workers = 1;
};

struct PipelineResult {
  std::optional<Trajectory> trajectory;
  CoarsePath coarse;
  std::vector<DrivingCorridor> corridors;
  bool used_guided = false;
  std::string failure;       // search-failure | corridor-failure | solver-infeasible
  double computation_time = 0.0;  // planning + optimization wall seconds
};

// Full pipeline on one scenario: complexity gate, search, corridor build,
// trajectory optimization. Timing covers planning and optimization only.
PipelineResult run_pipeline(const Scenario& s, const VehicleParams& params, const RunConfig& cfg,
                            const MlpModel* model);

struct ScenarioRow {
  uint64_t seed = 0;
  bool success = false;
  std::string failure;
  bool used_guided = false;
  double path_length = 0.0;
  double traversal_time = 0.0;
  double computation_time = 0.0;
  double max_jerk = 0.0;
  double avg_jerk = 0.0;
  double crp = 0.0;
  double min_ped_distance = 0.0;
};

struct EvaluationReport {
  std::vector<ScenarioRow> rows;

  int successes() const;
  double success_rate() const;  // NaN for an empty batch
  double mean_over_successes(double ScenarioRow::*field) const;
};

// Scenarios are distributed over a worker pool; planning outputs do not
// depend on the worker count (timings do).
EvaluationReport evaluate_batch(const std::vector<Scenario>& scenarios,
                                const VehicleParams& params, const RunConfig& cfg,
                                const MlpModel* model);

void save_report(const EvaluationReport& report, const std::string& path);

}  // namespace fwis
