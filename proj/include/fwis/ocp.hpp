#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fwis/corridor.hpp"
#include "fwis/planner.hpp"
#include "fwis/scenario.hpp"

namespace fwis {

// Time-discretized mode-annotated trajectory: N+1 state samples, N
// piecewise-constant control intervals, free final time.
struct Trajectory {
  int n = 0;  // interval count
  std::vector<double> x, y, v, theta, delta;  // n+1 entries, theta unwrapped
  std::vector<double> a, omega;               // n entries
  double t_f = 0.0;
  std::vector<MotionMode> modes;  // per interval

  double dt() const { return t_f / n; }
  MotionMode sample_mode(int j) const { return modes[std::min(j, n - 1)]; }
  Point2 position(int j) const { return {x[j], y[j]}; }
};

struct DriveOverRegion {
  int obstacle = -1;
  double xmin, xmax, ymin, ymax;
  double v_lb = 0.5, v_ub = 2.0;
};

struct OcpProblem {
  int n = 200;
  Trajectory warm;
  std::vector<MotionMode> modes;    // per interval
  std::vector<double> zt_sign;      // rotation direction per zero-turn interval
  std::vector<uint8_t> one_sided;   // last interval before a mode switch
  std::vector<uint8_t> v_pinned;    // per sample, v == 0 enforced
  std::vector<double> delta_bound;  // per sample
  std::vector<CorridorBounds> corridors;  // n+1
  std::vector<DriveOverRegion> regions;
  VehicleState s0, sf;  // boundary states, theta pre-unwrapped
  double lambda1 = 0.5, lambda2 = 0.5;
  VehicleParams params;
  double a_max = 1.5, omega_max = 0.5, v_max = 3.0;
  double t_min = 0.1;
};

struct OcpBuildConfig {
  int n_samples = 200;
  double lambda1 = 0.5, lambda2 = 0.5;
  double v_lb = 0.5, v_ub = 2.0;  // drive-over speed window
  bool use_risk_corridors = true;
  CorridorParams corridor;
  RiskFieldParams risk;
};

struct BuildOutcome {
  std::optional<OcpProblem> problem;
  std::string error;
};

// Resamples the coarse path onto the uniform grid, freezes the mode
// schedule, grows (and risk-shrinks) a corridor at every sample, and
// extracts drive-over regions from the recorded decisions.
BuildOutcome build_problem(const CoarsePath& coarse, const Scenario& s,
                           const VehicleParams& params, const OcpBuildConfig& cfg);

// lambda1 * t_f + lambda2 * quadrature of (a^2 + delta^2 + omega^2).
double trajectory_cost(const Trajectory& traj, double lambda1, double lambda2);

// Collocation residuals of the active mode per interval, mode-switch
// continuity included; ordering matches the solver's equality rows.
std::vector<double> kinematic_defects(const OcpProblem& p, const Trajectory& traj);

// chi * sigma terms, one value per (region, sample), positive on violation.
std::vector<double> drive_over_violations(const OcpProblem& p, const Trajectory& traj);

struct SolverConfig {
  int max_outer = 60;
  int max_inner = 600;
  double mu0 = 10.0;
  double mu_growth = 6.0;
  double mu_max = 3e7;  // multipliers finish the job; huge mu only hurts conditioning
  double eq_tol = 2e-5;
  double ineq_tol = 5e-7;
  double grad_tol = 1e-7;
};

struct SolveReport {
  bool feasible = false;
  double cost = 0.0;
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
  int outer_iterations = 0;
  std::vector<std::string> log;
};

struct SolveOutcome {
  std::optional<Trajectory> trajectory;
  SolveReport report;
};

// Augmented-Lagrangian outer loop over a quasi-Newton inner minimizer with
// analytic gradients; returns the best feasible iterate found (the warm
// start competes too).
SolveOutcome solve(const OcpProblem& p, const SolverConfig& cfg = {});

// Full augmented Lagrangian value/gradient at the packed iterate; exposed
// for derivative checks.
class OcpEvaluator {
 public:
  explicit OcpEvaluator(const OcpProblem& p);

  int dim() const { return dim_; }
  int eq_count() const { return static_cast<int>(eq_rows_.size()); }
  int ineq_count() const { return ineq_count_; }

  Eigen::VectorXd pack(const Trajectory& t) const;
  Trajectory unpack(const Eigen::VectorXd& z) const;

  void equalities(const Eigen::VectorXd& z, Eigen::VectorXd& h) const;
  void inequalities(const Eigen::VectorXd& z, Eigen::VectorXd& g) const;
  double cost(const Eigen::VectorXd& z, Eigen::VectorXd* grad) const;
  double augmented(const Eigen::VectorXd& z, const Eigen::VectorXd& lam_eq,
                   const Eigen::VectorXd& lam_ineq, double mu, Eigen::VectorXd* grad) const;

  // Re-evaluates the drive-over indicator and travel direction from the
  // iterate; returns the rows whose activation changed.
  std::vector<int> refresh_logical(const Eigen::VectorXd& z);

 private:
  struct EqRow {
    uint8_t kind;  // defect component, boundary, pin
    int index;
    int comp;
  };
  const OcpProblem* p_;
  int dim_ = 0;
  int ineq_count_ = 0;
  std::vector<EqRow> eq_rows_;
  std::vector<int8_t> region_active_;  // per (region, sample)
  std::vector<int8_t> region_sign_;

  friend SolveOutcome solve(const OcpProblem&, const SolverConfig&);
};

void save_trajectory(const Trajectory& traj, const std::string& path);

}  // namespace fwis
