// Command-line front end: scenario generation, guided points, coarse
// planning, trajectory optimization, the full pipeline, batch A/B
// evaluation, classifier training, and SVG rendering.

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fwis/classifier.hpp"
#include "fwis/eval.hpp"
#include "fwis/guided_points.hpp"
#include "fwis/metrics.hpp"
#include "fwis/ocp.hpp"
#include "fwis/planner.hpp"
#include "fwis/render.hpp"
#include "fwis/scenario.hpp"

namespace fs = std::filesystem;
using namespace fwis;

namespace {

int density_to_obstacles(const std::string& density) {
  if (density == "low") return 5;
  if (density == "medium") return 7;
  if (density == "high") return 9;
  throw CLI::ValidationError("--density must be low, medium, or high");
}

struct CommonOpts {
  uint64_t seed = 1;
  std::string density = "medium";
  std::string out = ".";
  int workers = 0;
  bool no_guided = false;
  bool force_hard = false;
  bool force_easy = false;
  bool no_crossable = false;
  bool no_drive_over = false;
  bool no_risk = false;
  std::string model_path;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seed, "scenario seed");
  cmd->add_option("--density", o.density, "low|medium|high (5/7/9 obstacles)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "worker pool size (0 = hardware default)");
  cmd->add_flag("--no-guided-points", o.no_guided, "pin the direct search");
  cmd->add_flag("--force-hard", o.force_hard, "treat every task as hard");
  cmd->add_flag("--force-easy", o.force_easy, "treat every task as easy");
  cmd->add_flag("--no-crossable", o.no_crossable, "disable crossable handling");
  cmd->add_flag("--no-drive-over", o.no_drive_over, "disable drive-over handling");
  cmd->add_flag("--no-risk-corridor", o.no_risk, "skip risk-aware corridor shrinking");
  cmd->add_option("--model", o.model_path, "classifier checkpoint for scene gating");
}

RunConfig to_run_config(const CommonOpts& o) {
  RunConfig cfg;
  cfg.use_guided = !o.no_guided;
  if (o.force_hard)
    cfg.classifier = ClassifierMode::ForceHard;
  else if (o.force_easy)
    cfg.classifier = ClassifierMode::ForceEasy;
  else if (!o.model_path.empty())
    cfg.classifier = ClassifierMode::On;
  else
    cfg.classifier = ClassifierMode::Off;
  cfg.crossable = !o.no_crossable;
  cfg.drive_over = !o.no_drive_over;
  cfg.risk_corridor = !o.no_risk;
  cfg.workers = o.workers;
  return cfg;
}

Scenario load_or_generate(const CommonOpts& o, const std::string& scenario_file) {
  if (!scenario_file.empty()) return load_scenario(scenario_file);
  return generate_scenario(o.seed, density_to_obstacles(o.density));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4WIS trajectory planning toolkit"};
  app.require_subcommand(1);

  const VehicleParams params;

  // gen
  auto* gen = app.add_subcommand("gen", "generate scenarios and scene images");
  CommonOpts gen_o;
  int gen_count = 1;
  add_common(gen, gen_o);
  gen->add_option("--count", gen_count, "number of scenarios");

  // guide
  auto* guide = app.add_subcommand("guide", "compute the key point set");
  CommonOpts guide_o;
  std::string guide_file;
  add_common(guide, guide_o);
  guide->add_option("--scenario", guide_file, "scenario file (generated otherwise)");

  // plan
  auto* plan = app.add_subcommand("plan", "coarse path search");
  CommonOpts plan_o;
  std::string plan_file;
  add_common(plan, plan_o);
  plan->add_option("--scenario", plan_file, "scenario file (generated otherwise)");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "trajectory optimization on a coarse path");
  CommonOpts opt_o;
  std::string opt_file;
  add_common(optimize, opt_o);
  optimize->add_option("--scenario", opt_file, "scenario file (generated otherwise)");

  // run
  auto* run = app.add_subcommand("run", "full pipeline: gate, search, optimize");
  CommonOpts run_o;
  std::string run_file;
  add_common(run, run_o);
  run->add_option("--scenario", run_file, "scenario file (generated otherwise)");

  // eval
  auto* eval = app.add_subcommand("eval", "batch A/B evaluation");
  CommonOpts eval_o;
  int eval_count = 30;
  bool eval_ab = false;
  add_common(eval, eval_o);
  eval->add_option("--count", eval_count, "scenarios in the batch");
  eval->add_flag("--ab", eval_ab, "paired guided/direct comparison");

  // train
  auto* train_cmd = app.add_subcommand("train", "auto-label scenarios and train the classifier");
  CommonOpts train_o;
  int train_count = 300;
  int train_epochs = 100;
  uint64_t train_seed = 1;
  add_common(train_cmd, train_o);
  train_cmd->add_option("--count", train_count, "scenarios to label");
  train_cmd->add_option("--epochs", train_epochs, "training epochs");
  train_cmd->add_option("--train-seed", train_seed, "weight init / shuffle seed");

  // render
  auto* render = app.add_subcommand("render", "render the pipeline stages to SVG");
  CommonOpts render_o;
  std::string render_file;
  add_common(render, render_o);
  render->add_option("--scenario", render_file, "scenario file (generated otherwise)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      fs::create_directories(gen_o.out);
      for (int i = 0; i < gen_count; ++i) {
        const uint64_t seed = gen_o.seed + static_cast<uint64_t>(i);
        const Scenario s = generate_scenario(seed, density_to_obstacles(gen_o.density));
        char name[64];
        std::snprintf(name, sizeof(name), "scenario_%llu.txt",
                      static_cast<unsigned long long>(seed));
        save_scenario(s, (fs::path(gen_o.out) / name).string());
        std::snprintf(name, sizeof(name), "scene_%llu.ppm",
                      static_cast<unsigned long long>(seed));
        write_ppm(rasterize_scene(s, 200, 200, params), (fs::path(gen_o.out) / name).string());
      }
      std::printf("wrote %d scenario(s) to %s\n", gen_count, gen_o.out.c_str());
      return 0;
    }

    if (guide->parsed()) {
      const Scenario s = load_or_generate(guide_o, guide_file);
      const auto kps = generate_guided_points(s, params, PlannerConfig{}.grid_resolution);
      if (!kps) {
        std::fprintf(stderr, "guide: grid search failed\n");
        return 1;
      }
      fs::create_directories(guide_o.out);
      const std::string out = (fs::path(guide_o.out) / "key_points.txt").string();
      save_key_points(*kps, out);
      std::printf("key points: %zu (gear shift at %d) -> %s\n", kps->points.size(),
                  kps->gear_shift_index ? *kps->gear_shift_index : -1, out.c_str());
      return 0;
    }

    if (plan->parsed()) {
      const Scenario s = load_or_generate(plan_o, plan_file);
      RunConfig cfg = to_run_config(plan_o);
      PlannerConfig pcfg;
      pcfg.enable_crossable = cfg.crossable;
      pcfg.enable_drive_over = cfg.drive_over;
      PolicyOverride policy = PolicyOverride::ForceEasy;
      if (cfg.use_guided && cfg.classifier != ClassifierMode::ForceEasy)
        policy = PolicyOverride::ForceHard;
      const InitialPathResult r = initial_path(s, params, pcfg, policy);
      if (!r.path) {
        std::fprintf(stderr, "plan: %s\n", r.failure.c_str());
        return 1;
      }
      fs::create_directories(plan_o.out);
      const std::string out = (fs::path(plan_o.out) / "coarse_path.txt").string();
      save_coarse_path(*r.path, out);
      std::printf("coarse path: %zu states, %.3f m -> %s\n", r.path->states.size(),
                  r.path->length(), out.c_str());
      return 0;
    }

    if (optimize->parsed() || run->parsed()) {
      const CommonOpts& o = optimize->parsed() ? opt_o : run_o;
      const Scenario s =
          load_or_generate(o, optimize->parsed() ? opt_file : run_file);
      RunConfig cfg = to_run_config(o);
      MlpModel model;
      const MlpModel* model_ptr = nullptr;
      if (cfg.classifier == ClassifierMode::On) {
        model = load_model(o.model_path);
        model_ptr = &model;
      }
      const PipelineResult r = run_pipeline(s, params, cfg, model_ptr);
      if (!r.trajectory) {
        std::fprintf(stderr, "pipeline: %s\n", r.failure.c_str());
        return 1;
      }
      fs::create_directories(o.out);
      const std::string traj_out = (fs::path(o.out) / "trajectory.txt").string();
      save_trajectory(*r.trajectory, traj_out);
      save_coarse_path(r.coarse, (fs::path(o.out) / "coarse_path.txt").string());
      const PathMetrics pm = path_metrics(*r.trajectory);
      const JerkMetrics jm = jerk_metrics(*r.trajectory);
      std::printf(
          "trajectory: length %.3f m, time %.3f s, max jerk %.3f, computation %.3f s -> %s\n",
          pm.length, pm.traversal_time, jm.max_jerk, r.computation_time, traj_out.c_str());
      return 0;
    }

    if (eval->parsed()) {
      std::vector<Scenario> batch;
      for (int i = 0; i < eval_count; ++i) {
        batch.push_back(
            generate_scenario(eval_o.seed + static_cast<uint64_t>(i),
                              density_to_obstacles(eval_o.density)));
      }
      fs::create_directories(eval_o.out);
      MlpModel model;
      const MlpModel* model_ptr = nullptr;
      RunConfig cfg = to_run_config(eval_o);
      if (cfg.classifier == ClassifierMode::On) {
        model = load_model(eval_o.model_path);
        model_ptr = &model;
      }
      if (eval_ab) {
        RunConfig guided = cfg;
        guided.use_guided = true;
        guided.classifier = ClassifierMode::ForceHard;
        RunConfig direct = cfg;
        direct.use_guided = false;
        const EvaluationReport ra = evaluate_batch(batch, params, guided, nullptr);
        const EvaluationReport rb = evaluate_batch(batch, params, direct, nullptr);
        save_report(ra, (fs::path(eval_o.out) / "report_guided.txt").string());
        save_report(rb, (fs::path(eval_o.out) / "report_direct.txt").string());
        std::printf("guided: rate %.2f mean time %.3f | direct: rate %.2f mean time %.3f\n",
                    ra.success_rate(), ra.mean_over_successes(&ScenarioRow::computation_time),
                    rb.success_rate(), rb.mean_over_successes(&ScenarioRow::computation_time));
      } else {
        const EvaluationReport r = evaluate_batch(batch, params, cfg, model_ptr);
        save_report(r, (fs::path(eval_o.out) / "report.txt").string());
        std::printf("success rate %.2f over %zu scenarios\n", r.success_rate(), r.rows.size());
      }
      return 0;
    }

    if (train_cmd->parsed()) {
      fs::create_directories(train_o.out);
      std::vector<Scenario> scenarios;
      std::vector<std::string> paths;
      for (int i = 0; i < train_count; ++i) {
        const uint64_t seed = train_o.seed + static_cast<uint64_t>(i);
        // Densities spread over the full range so both labels appear.
        const int nobs = static_cast<int>(seed % 13);
        scenarios.push_back(generate_scenario(seed, nobs));
        char name[64];
        std::snprintf(name, sizeof(name), "scenario_%llu.txt",
                      static_cast<unsigned long long>(seed));
        const std::string p = (fs::path(train_o.out) / name).string();
        save_scenario(scenarios.back(), p);
        paths.push_back(p);
      }
      const auto labeled = label_dataset(scenarios, params);
      save_dataset_index(labeled, paths, (fs::path(train_o.out) / "dataset.txt").string());

      std::vector<SampleFeatures> features;
      for (const LabeledScenario& l : labeled) {
        if (l.dropped) continue;
        const SceneImage img = rasterize_scene(l.scenario, 200, 200, params);
        SampleFeatures f =
            extract_features(img, l.scenario.init, l.scenario.goal, l.scenario.workspace);
        f.label = l.hard ? 1.0 : 0.0;
        features.push_back(std::move(f));
      }
      TrainConfig tcfg;
      tcfg.epochs = train_epochs;
      tcfg.seed = train_seed;
      const TrainResult res = train(features, tcfg);
      const std::string model_out = (fs::path(train_o.out) / "model.txt").string();
      save_model(res.model, model_out);
      std::printf("trained on %zu samples, test accuracy %.3f, best epoch %d -> %s\n",
                  features.size(), res.test_accuracy, res.best_epoch, model_out.c_str());
      return 0;
    }

    if (render->parsed()) {
      const Scenario s = load_or_generate(render_o, render_file);
      RunConfig cfg = to_run_config(render_o);
      const PipelineResult r = run_pipeline(s, params, cfg, nullptr);
      RenderLayers layers;
      layers.scenario = &s;
      layers.forecast_steps = 40;
      layers.forecast_horizon = 200;
      const auto kps = generate_guided_points(s, params, PlannerConfig{}.grid_resolution);
      if (kps) layers.key_points = &*kps;
      if (!r.coarse.empty()) layers.coarse = &r.coarse;
      if (r.trajectory) layers.trajectory = &*r.trajectory;
      if (!r.corridors.empty()) layers.corridors = &r.corridors;
      fs::create_directories(render_o.out);
      const std::string out = (fs::path(render_o.out) / "scene.svg").string();
      render_svg(layers, out);
      std::printf("rendered %s (%s)\n", out.c_str(),
                  r.trajectory ? "with trajectory" : r.failure.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
