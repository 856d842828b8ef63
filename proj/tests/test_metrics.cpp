#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fwis/eval.hpp"
#include "fwis/metrics.hpp"
#include "fwis/render.hpp"

using namespace fwis;

namespace {

Trajectory make_traj(int n, double tf) {
  Trajectory t;
  t.n = n;
  t.t_f = tf;
  t.x.assign(n + 1, 0.0);
  t.y.assign(n + 1, 0.0);
  t.v.assign(n + 1, 0.0);
  t.theta.assign(n + 1, 0.0);
  t.delta.assign(n + 1, 0.0);
  t.a.assign(n, 0.0);
  t.omega.assign(n, 0.0);
  t.modes.assign(n, MotionMode::Ackermann);
  return t;
}

}  // namespace

TEST_CASE("jerk metrics") {
  Trajectory constant = make_traj(10, 10.0);
  constant.a.assign(10, 0.7);
  const JerkMetrics zero = jerk_metrics(constant);
  CHECK(zero.max_jerk == 0.0);
  CHECK(zero.avg_jerk == 0.0);

  Trajectory alternating = make_traj(10, 10.0);  // dt = 1
  for (int k = 0; k < 10; ++k) alternating.a[k] = k % 2 == 0 ? 1.0 : -1.0;
  const JerkMetrics alt = jerk_metrics(alternating);
  CHECK(alt.max_jerk == doctest::Approx(2.0));
  CHECK(alt.avg_jerk == doctest::Approx(2.0));

  // Literal-formula oracle on a random control sequence.
  Rng rng(9);
  Trajectory rand_t = make_traj(50, 12.5);
  for (int k = 0; k < 50; ++k) rand_t.a[k] = rng.uniform(-1.5, 1.5);
  const JerkMetrics jm = jerk_metrics(rand_t);
  const double dt = rand_t.dt();
  double mx = 0.0, sum = 0.0;
  for (int k = 0; k + 1 < 50; ++k) {
    const double j = std::abs(rand_t.a[k + 1] - rand_t.a[k]) / dt;
    mx = std::max(mx, j);
    sum += j;
  }
  CHECK(jm.max_jerk == doctest::Approx(mx).epsilon(1e-12));
  CHECK(jm.avg_jerk == doctest::Approx(sum / 49.0).epsilon(1e-12));
}

TEST_CASE("path metrics") {
  Trajectory still = make_traj(10, 7.0);
  const PathMetrics pm = path_metrics(still);
  CHECK(pm.length == 0.0);
  CHECK(pm.traversal_time == 7.0);

  Trajectory straight = make_traj(100, 10.0);
  for (int j = 0; j <= 100; ++j) straight.x[j] = 0.1 * j;
  const PathMetrics sm = path_metrics(straight);
  CHECK(sm.length == doctest::Approx(10.0).epsilon(0.01));

  // Rotation-only trajectory has zero length; its duration equals the
  // heading change over the fixed yaw rate by construction upstream.
  Trajectory spin = make_traj(10, (M_PI / 2) / 0.5);
  for (int j = 0; j <= 10; ++j) spin.theta[j] = j * (M_PI / 2) / 10.0;
  spin.modes.assign(10, MotionMode::ZeroTurn);
  const PathMetrics zm = path_metrics(spin);
  CHECK(zm.length == 0.0);
  CHECK(zm.traversal_time == doctest::Approx(M_PI));
}

TEST_CASE("report aggregation equals recomputation") {
  EvaluationReport r;
  ScenarioRow a;
  a.success = true;
  a.path_length = 10.0;
  a.computation_time = 1.0;
  ScenarioRow b;
  b.success = false;
  b.failure = "search-failure";
  ScenarioRow c;
  c.success = true;
  c.path_length = 20.0;
  c.computation_time = 3.0;
  r.rows = {a, b, c};
  CHECK(r.successes() == 2);
  CHECK(r.success_rate() == doctest::Approx(2.0 / 3.0));
  CHECK(r.mean_over_successes(&ScenarioRow::path_length) == doctest::Approx(15.0));

  EvaluationReport empty;
  CHECK(std::isnan(empty.success_rate()));

  save_report(r, "report_test.txt");
  std::ifstream in("report_test.txt");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("seed\t", 0) == 0);
  std::remove("report_test.txt");
}

TEST_CASE("svg rendering is byte stable") {
  const Scenario s = generate_scenario(33, 6);
  RenderLayers layers;
  layers.scenario = &s;
  layers.forecast_steps = 40;
  layers.forecast_horizon = 200;
  render_svg(layers, "render_a.svg");
  render_svg(layers, "render_b.svg");
  std::ifstream fa("render_a.svg"), fb("render_b.svg");
  std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  CHECK(ca.find("<svg") != std::string::npos);
  CHECK(ca.find("legend") == std::string::npos);  // plain text legend, no id
  std::remove("render_a.svg");
  std::remove("render_b.svg");
}

TEST_CASE("full pipeline on an open map") {
  Scenario s;
  s.init.x = 8;
  s.init.y = 8;
  s.init.theta = 0.7;
  s.goal.x = 30;
  s.goal.y = 28;
  s.goal.theta = 0.7;
  RunConfig cfg;
  cfg.use_guided = false;
  const PipelineResult r = run_pipeline(s, VehicleParams{}, cfg, nullptr);
  REQUIRE(r.trajectory.has_value());
  CHECK(r.computation_time > 0.0);
  const PathMetrics pm = path_metrics(*r.trajectory);
  CHECK(pm.length > 20.0);
}

TEST_CASE("batch evaluation is deterministic across worker counts") {
  std::vector<Scenario> batch;
  for (uint64_t seed = 201; seed <= 204; ++seed) batch.push_back(generate_scenario(seed, 3));
  RunConfig one;
  one.use_guided = false;
  one.workers = 1;
  RunConfig two = one;
  two.workers = 2;
  const EvaluationReport ra = evaluate_batch(batch, VehicleParams{}, one, nullptr);
  const EvaluationReport rb = evaluate_batch(batch, VehicleParams{}, two, nullptr);
  REQUIRE(ra.rows.size() == rb.rows.size());
  for (size_t i = 0; i < ra.rows.size(); ++i) {
    CHECK(ra.rows[i].success == rb.rows[i].success);
    if (ra.rows[i].success) {
      CHECK(ra.rows[i].path_length == rb.rows[i].path_length);
      CHECK(ra.rows[i].crp == rb.rows[i].crp);
    }
  }
}
