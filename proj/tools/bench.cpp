// Benchmark comparing the OpenMP kernels against their serial reference
// implementations: per-sample corridor construction, scene rasterization,
// and batch pipeline evaluation.

#include <omp.h>

#include <cstdio>
#include <vector>

#include "fwis/corridor.hpp"
#include "fwis/eval.hpp"
#include "fwis/scenario.hpp"

using namespace fwis;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e18;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    f();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = omp_get_max_threads();
  if (argc > 1) threads = std::atoi(argv[1]);
  omp_set_num_threads(threads);
  std::printf("threads: %d\n\n", threads);
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial (s)", "parallel (s)", "speedup");

  const VehicleParams params;
  const Scenario s = generate_scenario(7, 9);

  {
    // Corridor construction across 600 samples of a sweep through the map.
    std::vector<Point2> pos, vel;
    for (int i = 0; i <= 600; ++i) {
      pos.push_back({2.0 + 36.0 * i / 600.0, 20.0 + 6.0 * std::sin(i * 0.02)});
      vel.push_back({1.0, 0.0});
    }
    std::vector<double> headings(pos.size(), 0.0);
    std::vector<double> bands(pos.size(), M_PI / 18.0);
    const CorridorParams cp;
    const RiskFieldParams rp;
    CorridorBuildResult out;
    const double ts = time_best_of(3, [&] {
      out = build_corridors_serial(pos, vel, headings, bands, s, params, cp, rp, 0.25, true);
    });
    const double tp = time_best_of(3, [&] {
      out = build_corridors(pos, vel, headings, bands, s, params, cp, rp, 0.25, true);
    });
    std::printf("%-28s %12.4f %12.4f %7.2fx\n", "corridor build (601 pts)", ts, tp, ts / tp);
  }

  {
    SceneImage img;
    const double ts = time_best_of(3, [&] { img = rasterize_scene_serial(s, 600, 600, params); });
    const double tp = time_best_of(3, [&] { img = rasterize_scene(s, 600, 600, params); });
    std::printf("%-28s %12.4f %12.4f %7.2fx\n", "rasterize 600x600", ts, tp, ts / tp);
  }

  {
    std::vector<Scenario> batch;
    for (uint64_t seed = 300; seed < 308; ++seed) batch.push_back(generate_scenario(seed, 5));
    RunConfig serial_cfg;
    serial_cfg.use_guided = false;
    serial_cfg.workers = 1;
    RunConfig par_cfg = serial_cfg;
    par_cfg.workers = threads;
    EvaluationReport rep;
    const double ts =
        time_best_of(1, [&] { rep = evaluate_batch(batch, params, serial_cfg, nullptr); });
    const double tp =
        time_best_of(1, [&] { rep = evaluate_batch(batch, params, par_cfg, nullptr); });
    std::printf("%-28s %12.4f %12.4f %7.2fx\n", "batch eval (8 scenarios)", ts, tp, ts / tp);
  }
  return 0;
}
