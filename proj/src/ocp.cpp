#include "fwis/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fwis {

namespace {

// The warm start is parameterized at a deliberately slow cruise so the
// optimizer starts from an expensive but nearly-feasible guess and improves
// it.
constexpr double kWarmSpeed = 0.5;

enum EqKind : uint8_t {
  kDefX = 0,
  kDefY,
  kDefV,
  kDefTheta,
  kDefDelta,
  kBoundary0,
  kBoundaryF,
  kVPin,
  kPinA,
  kPinW,
};

struct RowGrad {
  double value = 0.0;
  int n = 0;
  int idx[10];
  double coef[10];

  void add(int i, double c) {
    idx[n] = i;
    coef[n] = c;
    ++n;
  }
};

}  // namespace

OcpEvaluator::OcpEvaluator(const OcpProblem& p) : p_(&p) {
  const int n = p.n;
  dim_ = 5 * (n + 1) + 2 * n + 1;
  for (int k = 0; k < n; ++k) {
    const MotionMode m = p.modes[k];
    eq_rows_.push_back({kDefX, k, 0});
    eq_rows_.push_back({kDefY, k, 0});
    if (m != MotionMode::ZeroTurn) eq_rows_.push_back({kDefV, k, 0});
    eq_rows_.push_back({kDefTheta, k, 0});
    if (!p.one_sided[k]) eq_rows_.push_back({kDefDelta, k, 0});
    if (m == MotionMode::ZeroTurn) {
      eq_rows_.push_back({kPinA, k, 0});
      eq_rows_.push_back({kPinW, k, 0});
    } else if (m == MotionMode::Diagonal) {
      eq_rows_.push_back({kPinW, k, 0});
    }
  }
  for (int c = 0; c < 5; ++c) eq_rows_.push_back({kBoundary0, 0, c});
  for (int c = 0; c < 5; ++c) eq_rows_.push_back({kBoundaryF, n, c});
  for (int j = 0; j <= n; ++j) {
    if (p.v_pinned[j]) eq_rows_.push_back({kVPin, j, 0});
  }
  const int regions = static_cast<int>(p.regions.size());
  ineq_count_ = 8 * (n + 1) + 4 * n + 1 + 2 * regions * (n + 1);
  region_active_.assign(static_cast<size_t>(regions) * (n + 1), 0);
  region_sign_.assign(static_cast<size_t>(regions) * (n + 1), 1);
}

namespace {

struct Layout {
  int n;
  int x(int j) const { return j; }
  // Final time enters every defect through dt = tf/n. Below the floor the
  // clamped value (with zero sensitivity) keeps the quadrature sign fixed,
  // so negative tf cannot turn effort terms into rewards; the tf >= t_min
  // inequality pushes the raw variable back.
  double tf_clamped(const Eigen::VectorXd& z, double t_min, double* dgrad = nullptr) const {
    const double raw = z[tf()];
    if (raw >= t_min) {
      if (dgrad != nullptr) *dgrad = 1.0;
      return raw;
    }
    if (dgrad != nullptr) *dgrad = 0.0;
    return t_min;
  }
  int y(int j) const { return (n + 1) + j; }
  int v(int j) const { return 2 * (n + 1) + j; }
  int th(int j) const { return 3 * (n + 1) + j; }
  int de(int j) const { return 4 * (n + 1) + j; }
  int a(int k) const { return 5 * (n + 1) + k; }
  int w(int k) const { return 5 * (n + 1) + n + k; }
  int tf() const { return 5 * (n + 1) + 2 * n; }
};

}  // namespace

Eigen::VectorXd OcpEvaluator::pack(const Trajectory& t) const {
  const Layout L{p_->n};
  Eigen::VectorXd z(dim_);
  for (int j = 0; j <= p_->n; ++j) {
    z[L.x(j)] = t.x[j];
    z[L.y(j)] = t.y[j];
    z[L.v(j)] = t.v[j];
    z[L.th(j)] = t.theta[j];
    z[L.de(j)] = t.delta[j];
  }
  for (int k = 0; k < p_->n; ++k) {
    z[L.a(k)] = t.a[k];
    z[L.w(k)] = t.omega[k];
  }
  z[L.tf()] = t.t_f;
  return z;
}

Trajectory OcpEvaluator::unpack(const Eigen::VectorXd& z) const {
  const Layout L{p_->n};
  Trajectory t;
  t.n = p_->n;
  t.x.resize(t.n + 1);
  t.y.resize(t.n + 1);
  t.v.resize(t.n + 1);
  t.theta.resize(t.n + 1);
  t.delta.resize(t.n + 1);
  t.a.resize(t.n);
  t.omega.resize(t.n);
  for (int j = 0; j <= t.n; ++j) {
    t.x[j] = z[L.x(j)];
    t.y[j] = z[L.y(j)];
    t.v[j] = z[L.v(j)];
    t.theta[j] = z[L.th(j)];
    t.delta[j] = z[L.de(j)];
  }
  for (int k = 0; k < t.n; ++k) {
    t.a[k] = z[L.a(k)];
    t.omega[k] = z[L.w(k)];
  }
  t.t_f = z[L.tf()];
  t.modes = p_->modes;
  return t;
}

namespace {

RowGrad eval_eq_row(const OcpProblem& p, const Layout& L, const Eigen::VectorXd& z, uint8_t kind,
                    int index, int comp) {
  RowGrad r;
  const int n = p.n;
  double tf_sens;
  const double tf = L.tf_clamped(z, p.t_min, &tf_sens);
  const double dt = tf / n;

  switch (kind) {
    case kDefX:
    case kDefY: {
      const int k = index;
      const MotionMode m = p.modes[k];
      const bool is_x = kind == kDefX;
      const int pos0 = is_x ? L.x(k) : L.y(k);
      const int pos1 = is_x ? L.x(k + 1) : L.y(k + 1);
      const auto dir_angle = [&](int j) {
        return m == MotionMode::Diagonal ? z[L.th(j)] + z[L.de(j)] : z[L.th(j)];
      };
      const auto trig = [&](int j) { return is_x ? std::cos(dir_angle(j)) : std::sin(dir_angle(j)); };
      const auto dtrig = [&](int j) {
        return is_x ? -std::sin(dir_angle(j)) : std::cos(dir_angle(j));
      };
      if (m == MotionMode::ZeroTurn) {
        r.value = z[pos1] - z[pos0];
        r.add(pos1, 1.0);
        r.add(pos0, -1.0);
        break;
      }
      if (p.one_sided[k]) {  // left-rectangle rule across the mode switch
        const double f0 = z[L.v(k)] * trig(k);
        r.value = z[pos1] - z[pos0] - dt * f0;
        r.add(pos1, 1.0);
        r.add(pos0, -1.0);
        r.add(L.v(k), -dt * trig(k));
        r.add(L.th(k), -dt * z[L.v(k)] * dtrig(k));
        if (m == MotionMode::Diagonal) r.add(L.de(k), -dt * z[L.v(k)] * dtrig(k));
        r.add(L.tf(), tf_sens * (-f0 / n));
      } else {
        const double f0 = z[L.v(k)] * trig(k);
        const double f1 = z[L.v(k + 1)] * trig(k + 1);
        r.value = z[pos1] - z[pos0] - 0.5 * dt * (f0 + f1);
        r.add(pos1, 1.0);
        r.add(pos0, -1.0);
        r.add(L.v(k), -0.5 * dt * trig(k));
        r.add(L.v(k + 1), -0.5 * dt * trig(k + 1));
        r.add(L.th(k), -0.5 * dt * z[L.v(k)] * dtrig(k));
        r.add(L.th(k + 1), -0.5 * dt * z[L.v(k + 1)] * dtrig(k + 1));
        if (m == MotionMode::Diagonal) {
          r.add(L.de(k), -0.5 * dt * z[L.v(k)] * dtrig(k));
          r.add(L.de(k + 1), -0.5 * dt * z[L.v(k + 1)] * dtrig(k + 1));
        }
        r.add(L.tf(), tf_sens * (-0.5 * (f0 + f1) / n));
      }
      break;
    }
    case kDefV: {
      const int k = index;
      r.value = z[L.v(k + 1)] - z[L.v(k)] - dt * z[L.a(k)];
      r.add(L.v(k + 1), 1.0);
      r.add(L.v(k), -1.0);
      r.add(L.a(k), -dt);
      r.add(L.tf(), tf_sens * (-z[L.a(k)] / n));
      break;
    }
    case kDefTheta: {
      const int k = index;
      const MotionMode m = p.modes[k];
      if (m == MotionMode::Ackermann) {
        const double lw = p.params.wheelbase;
        const auto f = [&](int j) { return 2.0 * z[L.v(j)] * std::tan(z[L.de(j)]) / lw; };
        const auto sec2 = [&](int j) {
          const double t = std::tan(z[L.de(j)]);
          return 1.0 + t * t;
        };
        if (p.one_sided[k]) {
          r.value = z[L.th(k + 1)] - z[L.th(k)] - dt * f(k);
          r.add(L.th(k + 1), 1.0);
          r.add(L.th(k), -1.0);
          r.add(L.v(k), -dt * 2.0 * std::tan(z[L.de(k)]) / lw);
          r.add(L.de(k), -dt * 2.0 * z[L.v(k)] * sec2(k) / lw);
          r.add(L.tf(), tf_sens * (-f(k) / n));
        } else {
          r.value = z[L.th(k + 1)] - z[L.th(k)] - 0.5 * dt * (f(k) + f(k + 1));
          r.add(L.th(k + 1), 1.0);
          r.add(L.th(k), -1.0);
          r.add(L.v(k), -0.5 * dt * 2.0 * std::tan(z[L.de(k)]) / lw);
          r.add(L.v(k + 1), -0.5 * dt * 2.0 * std::tan(z[L.de(k + 1)]) / lw);
          r.add(L.de(k), -0.5 * dt * 2.0 * z[L.v(k)] * sec2(k) / lw);
          r.add(L.de(k + 1), -0.5 * dt * 2.0 * z[L.v(k + 1)] * sec2(k + 1) / lw);
          r.add(L.tf(), tf_sens * (-0.5 * (f(k) + f(k + 1)) / n));
        }
      } else if (m == MotionMode::Diagonal) {
        r.value = z[L.th(k + 1)] - z[L.th(k)];
        r.add(L.th(k + 1), 1.0);
        r.add(L.th(k), -1.0);
      } else {  // zero turn at the fixed yaw rate
        const double rate = p.zt_sign[k] * p.params.yaw_rate;
        r.value = z[L.th(k + 1)] - z[L.th(k)] - dt * rate;
        r.add(L.th(k + 1), 1.0);
        r.add(L.th(k), -1.0);
        r.add(L.tf(), tf_sens * (-rate / n));
      }
      break;
    }
    case kDefDelta: {
      const int k = index;
      if (p.modes[k] == MotionMode::Ackermann) {
        r.value = z[L.de(k + 1)] - z[L.de(k)] - dt * z[L.w(k)];
        r.add(L.de(k + 1), 1.0);
        r.add(L.de(k), -1.0);
        r.add(L.w(k), -dt);
        r.add(L.tf(), tf_sens * (-z[L.w(k)] / n));
      } else {  // frozen wheel angle
        r.value = z[L.de(k + 1)] - z[L.de(k)];
        r.add(L.de(k + 1), 1.0);
        r.add(L.de(k), -1.0);
      }
      break;
    }
    case kBoundary0:
    case kBoundaryF: {
      const int j = index;
      const VehicleState& target = kind == kBoundary0 ? p.s0 : p.sf;
      const int vars[5] = {L.x(j), L.y(j), L.v(j), L.th(j), L.de(j)};
      const double want[5] = {target.x, target.y, target.v, target.theta, target.delta};
      r.value = z[vars[comp]] - want[comp];
      r.add(vars[comp], 1.0);
      break;
    }
    case kVPin: {
      r.value = z[L.v(index)];
      r.add(L.v(index), 1.0);
      break;
    }
    case kPinA: {
      r.value = z[L.a(index)];
      r.add(L.a(index), 1.0);
      break;
    }
    case kPinW:
    default: {
      r.value = z[L.w(index)];
      r.add(L.w(index), 1.0);
      break;
    }
  }
  return r;
}

}  // namespace

void OcpEvaluator::equalities(const Eigen::VectorXd& z, Eigen::VectorXd& h) const {
  const Layout L{p_->n};
  h.resize(static_cast<long>(eq_rows_.size()));
  for (size_t i = 0; i < eq_rows_.size(); ++i) {
    h[static_cast<long>(i)] =
        eval_eq_row(*p_, L, z, eq_rows_[i].kind, eq_rows_[i].index, eq_rows_[i].comp).value;
  }
}

namespace {

// Inequality rows in fixed order; inactive drive-over rows report -1.
template <typename Visit>
void for_each_ineq(const OcpProblem& p, const Layout& L, const Eigen::VectorXd& z,
                   const std::vector<int8_t>& region_active, const std::vector<int8_t>& region_sign,
                   Visit&& visit) {
  const int n = p.n;
  int row = 0;
  for (int j = 0; j <= n; ++j) {
    const CorridorBounds& c = p.corridors[j];
    {
      RowGrad r;
      r.value = c.xmin - z[L.x(j)];
      r.add(L.x(j), -1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = z[L.x(j)] - c.xmax;
      r.add(L.x(j), 1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = c.ymin - z[L.y(j)];
      r.add(L.y(j), -1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = z[L.y(j)] - c.ymax;
      r.add(L.y(j), 1.0);
      visit(row++, r);
    }
  }
  for (int j = 0; j <= n; ++j) {
    {
      RowGrad r;
      r.value = z[L.v(j)] - p.v_max;
      r.add(L.v(j), 1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = -z[L.v(j)] - p.v_max;
      r.add(L.v(j), -1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = z[L.de(j)] - p.delta_bound[j];
      r.add(L.de(j), 1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = -z[L.de(j)] - p.delta_bound[j];
      r.add(L.de(j), -1.0);
      visit(row++, r);
    }
  }
  for (int k = 0; k < n; ++k) {
    {
      RowGrad r;
      r.value = z[L.a(k)] - p.a_max;
      r.add(L.a(k), 1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = -z[L.a(k)] - p.a_max;
      r.add(L.a(k), -1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = z[L.w(k)] - p.omega_max;
      r.add(L.w(k), 1.0);
      visit(row++, r);
    }
    {
      RowGrad r;
      r.value = -z[L.w(k)] - p.omega_max;
      r.add(L.w(k), -1.0);
      visit(row++, r);
    }
  }
  {
    RowGrad r;
    r.value = p.t_min - z[L.tf()];  // on the raw variable
    r.add(L.tf(), -1.0);
    visit(row++, r);
  }
  for (size_t reg = 0; reg < p.regions.size(); ++reg) {
    const DriveOverRegion& d = p.regions[reg];
    for (int j = 0; j <= n; ++j) {
      const size_t slot = reg * (n + 1) + j;
      if (region_active[slot]) {
        const double sign = region_sign[slot];
        {
          RowGrad r;
          r.value = sign * z[L.v(j)] - d.v_ub;
          r.add(L.v(j), sign);
          visit(row++, r);
        }
        {
          RowGrad r;
          r.value = d.v_lb - sign * z[L.v(j)];
          r.add(L.v(j), -sign);
          visit(row++, r);
        }
      } else {
        RowGrad r;
        r.value = -1.0;
        visit(row++, r);
        visit(row++, r);
      }
    }
  }
}

}  // namespace

void OcpEvaluator::inequalities(const Eigen::VectorXd& z, Eigen::VectorXd& g) const {
  const Layout L{p_->n};
  g.resize(ineq_count_);
  for_each_ineq(*p_, L, z, region_active_, region_sign_,
                [&](int row, const RowGrad& r) { g[row] = r.value; });
}

double OcpEvaluator::cost(const Eigen::VectorXd& z, Eigen::VectorXd* grad) const {
  const Layout L{p_->n};
  const int n = p_->n;
  double tf_sens;
  const double tf = L.tf_clamped(z, p_->t_min, &tf_sens);
  const double dt = tf / n;
  double s_ctrl = 0.0;
  for (int k = 0; k < n; ++k) {
    s_ctrl += z[L.a(k)] * z[L.a(k)] + z[L.w(k)] * z[L.w(k)];
  }
  double s_delta = 0.0;
  for (int k = 0; k < n; ++k) {
    s_delta += 0.5 * (z[L.de(k)] * z[L.de(k)] + z[L.de(k + 1)] * z[L.de(k + 1)]);
  }
  // The linear time term uses the raw variable so its pull-down gradient
  // never vanishes; the quadrature uses the clamped dt.
  const double j_c = p_->lambda1 * z[L.tf()] + p_->lambda2 * dt * (s_ctrl + s_delta);
  if (grad != nullptr) {
    grad->setZero(dim_);
    (*grad)[L.tf()] = p_->lambda1 + tf_sens * p_->lambda2 * (s_ctrl + s_delta) / n;
    for (int k = 0; k < n; ++k) {
      (*grad)[L.a(k)] = 2.0 * p_->lambda2 * dt * z[L.a(k)];
      (*grad)[L.w(k)] = 2.0 * p_->lambda2 * dt * z[L.w(k)];
    }
    for (int j = 0; j <= n; ++j) {
      const double c = (j == 0 || j == n) ? 1.0 : 2.0;
      (*grad)[L.de(j)] += p_->lambda2 * dt * c * z[L.de(j)];
    }
  }
  return j_c;
}

double OcpEvaluator::augmented(const Eigen::VectorXd& z, const Eigen::VectorXd& lam_eq,
                               const Eigen::VectorXd& lam_ineq, double mu,
                               Eigen::VectorXd* grad) const {
  const Layout L{p_->n};
  double phi = cost(z, grad);

  for (size_t i = 0; i < eq_rows_.size(); ++i) {
    const RowGrad r =
        eval_eq_row(*p_, L, z, eq_rows_[i].kind, eq_rows_[i].index, eq_rows_[i].comp);
    const double lam = lam_eq[static_cast<long>(i)];
    phi += lam * r.value + 0.5 * mu * r.value * r.value;
    if (grad != nullptr) {
      const double w = lam + mu * r.value;
      for (int t = 0; t < r.n; ++t) (*grad)[r.idx[t]] += w * r.coef[t];
    }
  }

  for_each_ineq(*p_, L, z, region_active_, region_sign_, [&](int row, const RowGrad& r) {
    const double lam = lam_ineq[row];
    const double t = lam + mu * r.value;
    if (t > 0.0) {
      phi += (t * t - lam * lam) / (2.0 * mu);
      if (grad != nullptr) {
        for (int q = 0; q < r.n; ++q) (*grad)[r.idx[q]] += t * r.coef[q];
      }
    } else {
      phi -= lam * lam / (2.0 * mu);
    }
  });
  return phi;
}

std::vector<int> OcpEvaluator::refresh_logical(const Eigen::VectorXd& z) {
  const Layout L{p_->n};
  const int n = p_->n;
  std::vector<int> changed;
  const int base = 8 * (n + 1) + 4 * n + 1;
  for (size_t reg = 0; reg < p_->regions.size(); ++reg) {
    const DriveOverRegion& d = p_->regions[reg];
    for (int j = 0; j <= n; ++j) {
      const size_t slot = reg * (n + 1) + j;
      const bool active = z[L.x(j)] >= d.xmin && z[L.x(j)] <= d.xmax && z[L.y(j)] >= d.ymin &&
                          z[L.y(j)] <= d.ymax;
      const int8_t sign = z[L.v(j)] >= 0.0 ? 1 : -1;
      if (active != (region_active_[slot] != 0) || (active && sign != region_sign_[slot])) {
        changed.push_back(base + static_cast<int>(slot) * 2);
        changed.push_back(base + static_cast<int>(slot) * 2 + 1);
      }
      region_active_[slot] = active ? 1 : 0;
      region_sign_[slot] = sign;
    }
  }
  return changed;
}

double trajectory_cost(const Trajectory& traj, double lambda1, double lambda2) {
  const double dt = traj.dt();
  double s = 0.0;
  for (int k = 0; k < traj.n; ++k) {
    s += traj.a[k] * traj.a[k] + traj.omega[k] * traj.omega[k];
    s += 0.5 * (traj.delta[k] * traj.delta[k] + traj.delta[k + 1] * traj.delta[k + 1]);
  }
  return lambda1 * traj.t_f + lambda2 * dt * s;
}

std::vector<double> kinematic_defects(const OcpProblem& p, const Trajectory& traj) {
  OcpEvaluator ev(p);
  const Eigen::VectorXd z = ev.pack(traj);
  Eigen::VectorXd h;
  ev.equalities(z, h);
  // Defect rows precede the boundary/pin rows for each interval; filter by
  // re-walking the same order.
  std::vector<double> out;
  size_t i = 0;
  for (int k = 0; k < p.n; ++k) {
    const MotionMode m = p.modes[k];
    int rows = 3;                                  // x, y, theta
    if (m != MotionMode::ZeroTurn) rows += 1;      // v
    if (!p.one_sided[k]) rows += 1;                // delta
    for (int q = 0; q < rows; ++q) out.push_back(h[static_cast<long>(i++)]);
    if (m == MotionMode::ZeroTurn) i += 2;
    else if (m == MotionMode::Diagonal) i += 1;
  }
  return out;
}

std::vector<double> drive_over_violations(const OcpProblem& p, const Trajectory& traj) {
  std::vector<double> out;
  for (const DriveOverRegion& d : p.regions) {
    for (int j = 0; j <= traj.n; ++j) {
      const bool chi = traj.x[j] >= d.xmin && traj.x[j] <= d.xmax && traj.y[j] >= d.ymin &&
                       traj.y[j] <= d.ymax;
      const double sigma =
          std::max(0.0, std::max(traj.v[j] - d.v_ub, d.v_lb - traj.v[j]));
      out.push_back(chi ? sigma : 0.0);
    }
  }
  return out;
}

namespace {

// Compact limited-memory BFGS with Armijo backtracking.
template <typename F>
int lbfgs_minimize(F&& fg, Eigen::VectorXd& x, int max_iterations, double grad_tol) {
  const int m = 8;
  const long dim = x.size();
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;
  Eigen::VectorXd g(dim), g_new(dim);
  double f = fg(x, &g);
  int iters = 0;
  for (; iters < max_iterations; ++iters) {
    if (g.lpNorm<Eigen::Infinity>() < grad_tol * std::max(1.0, std::abs(f))) break;

    // Two-loop recursion.
    Eigen::VectorXd q = g;
    const int h = static_cast<int>(s_hist.size());
    std::vector<double> alpha(h);
    for (int i = h - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (h > 0) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < h; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd d = -q;
    double dg = d.dot(g);
    if (dg > -1e-16) {  // not a descent direction, fall back to steepest
      d = -g;
      dg = -g.squaredNorm();
    }

    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    Eigen::VectorXd x_new;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + step * d;
      f_new = fg(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > m) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    const double improvement = f - f_new;
    x = x_new;
    f = f_new;
    g = g_new;
    if (improvement < 1e-14 * std::max(1.0, std::abs(f))) break;
  }
  return iters;
}

}  // namespace

SolveOutcome solve(const OcpProblem& p, const SolverConfig& cfg) {
  SolveOutcome outcome;
  OcpEvaluator ev(p);
  Eigen::VectorXd z = ev.pack(p.warm);
  ev.refresh_logical(z);

  Eigen::VectorXd lam_eq = Eigen::VectorXd::Zero(ev.eq_count());
  Eigen::VectorXd lam_ineq = Eigen::VectorXd::Zero(ev.ineq_count());
  double mu = cfg.mu0;

  Eigen::VectorXd h, g;
  const auto violations = [&](const Eigen::VectorXd& at, double& veq, double& vineq) {
    ev.equalities(at, h);
    ev.inequalities(at, g);
    veq = h.size() > 0 ? h.cwiseAbs().maxCoeff() : 0.0;
    vineq = g.size() > 0 ? std::max(0.0, g.maxCoeff()) : 0.0;
  };

  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z;
  bool have_best = false;

  double veq, vineq;
  violations(z, veq, vineq);
  if (veq <= cfg.eq_tol && vineq <= cfg.ineq_tol) {
    best_cost = ev.cost(z, nullptr);
    best_z = z;
    have_best = true;
  }

  double prev_viol = std::max(veq, vineq);
  int feasible_streak = 0;
  const double lambda_cap = 1e6;
  char line[160];
  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    lbfgs_minimize(
        [&](const Eigen::VectorXd& at, Eigen::VectorXd* grad) {
          return ev.augmented(at, lam_eq, lam_ineq, mu, grad);
        },
        z, cfg.max_inner, cfg.grad_tol);

    violations(z, veq, vineq);
    const double j_c = ev.cost(z, nullptr);
    const double merit = ev.augmented(z, lam_eq, lam_ineq, mu, nullptr);
    std::snprintf(line, sizeof(line), "outer %d mu %.1e cost %.6f eq %.3e ineq %.3e merit %.6f",
                  outer, mu, j_c, veq, vineq, merit);
    outcome.report.log.push_back(line);
    outcome.report.outer_iterations = outer;

    // Runaway iterate: restart from the best-known point with fresh
    // multipliers and a stiffer penalty.
    if (!std::isfinite(merit) || !std::isfinite(j_c) || veq > 1e5 || vineq > 1e5) {
      z = have_best ? best_z : ev.pack(p.warm);
      lam_eq.setZero();
      lam_ineq.setZero();
      mu = std::min(mu * cfg.mu_growth, cfg.mu_max);
      ev.refresh_logical(z);
      violations(z, veq, vineq);
      prev_viol = std::max(veq, vineq);
      feasible_streak = 0;
      continue;
    }

    if (veq <= cfg.eq_tol && vineq <= cfg.ineq_tol) {
      ++feasible_streak;
      const bool improved = j_c < best_cost - 1e-6 * std::max(1.0, std::abs(best_cost));
      if (j_c < best_cost) {
        best_cost = j_c;
        best_z = z;
        have_best = true;
      }
      // Stop once repeated feasible iterates stop improving the cost.
      if (feasible_streak >= 2 && !improved) break;
    } else {
      feasible_streak = 0;
    }

    // Multipliers always advance but stay bounded so the subproblem keeps
    // a coercive quadratic term; the penalty stiffens when violations
    // stall.
    lam_eq = (lam_eq + mu * h).cwiseMax(-lambda_cap).cwiseMin(lambda_cap);
    lam_ineq = (lam_ineq + mu * g).cwiseMax(0.0).cwiseMin(lambda_cap);
    const double viol = std::max(veq, vineq);
    if (viol > 0.25 * prev_viol) mu = std::min(mu * cfg.mu_growth, cfg.mu_max);
    prev_viol = viol;

    for (int row : ev.refresh_logical(z)) lam_ineq[row] = 0.0;
  }

  if (have_best) {
    double bveq, bvineq;
    violations(best_z, bveq, bvineq);
    outcome.report.feasible = true;
    outcome.report.cost = best_cost;
    outcome.report.max_eq_violation = bveq;
    outcome.report.max_ineq_violation = bvineq;
    outcome.trajectory = ev.unpack(best_z);
  } else {
    violations(z, veq, vineq);
    outcome.report.feasible = false;
    outcome.report.cost = ev.cost(z, nullptr);
    outcome.report.max_eq_violation = veq;
    outcome.report.max_ineq_violation = vineq;
  }
  return outcome;
}

BuildOutcome build_problem(const CoarsePath& coarse, const Scenario& s,
                           const VehicleParams& params, const OcpBuildConfig& cfg) {
  BuildOutcome out;
  if (coarse.states.empty()) {
    out.error = "empty coarse path";
    return out;
  }
  const int n = cfg.n_samples;
  const size_t m = coarse.states.size();

  // Time parameterization of the coarse samples: a trapezoidal speed
  // profile ramping through zero at the path ends and at every direction
  // change, the fixed yaw rate on rotations. The resulting warm start is
  // close to dynamically feasible.
  const double ramp_accel = 0.75;
  std::vector<double> times(m, 0.0);
  std::vector<double> theta_unwrapped(m);
  std::vector<double> warm_speed(m, 0.0);  // signed
  theta_unwrapped[0] = coarse.states[0].state.theta;
  {
    // Split the path into runs of constant travel direction.
    std::vector<double> arclen(m, 0.0);
    for (size_t i = 1; i < m; ++i) {
      arclen[i] = arclen[i - 1] + distance(coarse.states[i - 1].state.position(),
                                           coarse.states[i].state.position());
    }
    std::vector<size_t> cut{0};
    for (size_t i = 1; i + 1 < m; ++i) {
      const double va = coarse.states[i].state.v;
      const double vb = coarse.states[i + 1].state.v;
      if (va * vb < 0.0 || coarse.states[i + 1].mode == MotionMode::ZeroTurn ||
          coarse.states[i].mode == MotionMode::ZeroTurn) {
        if (cut.back() != i) cut.push_back(i);
      }
    }
    cut.push_back(m - 1);
    for (size_t c = 0; c + 1 < cut.size(); ++c) {
      const size_t i0 = cut[c], i1 = cut[c + 1];
      for (size_t i = i0; i <= i1; ++i) {
        const double to_start = arclen[i] - arclen[i0];
        const double to_end = arclen[i1] - arclen[i];
        const double vmag = std::min(
            kWarmSpeed, std::sqrt(2.0 * ramp_accel * std::max(0.0, std::min(to_start, to_end))));
        const double sign = coarse.states[std::min(i + 1, m - 1)].state.v >= 0.0 ? 1.0 : -1.0;
        if (i > i0 || c == 0) warm_speed[i] = sign * vmag;
      }
    }
  }
  for (size_t i = 1; i < m; ++i) {
    const CoarseState& a = coarse.states[i - 1];
    const CoarseState& b = coarse.states[i];
    const double ds = distance(a.state.position(), b.state.position());
    const double dth = angle_diff(b.state.theta, a.state.theta);
    double dt_pair;
    if (b.mode == MotionMode::ZeroTurn) {
      dt_pair = std::abs(dth) / params.yaw_rate;
    } else {
      const double pair_speed =
          std::max(0.5 * (std::abs(warm_speed[i - 1]) + std::abs(warm_speed[i])), 0.08);
      dt_pair = ds / pair_speed;
    }
    times[i] = times[i - 1] + dt_pair;
    theta_unwrapped[i] = theta_unwrapped[i - 1] + dth;
  }
  double total_time = times.back();
  if (total_time < 1e-9) total_time = 1.0;  // degenerate start-at-goal path

  OcpProblem p;
  p.n = n;
  p.params = params;
  p.lambda1 = cfg.lambda1;
  p.lambda2 = cfg.lambda2;

  Trajectory w;
  w.n = n;
  w.t_f = std::max(total_time, p.t_min * 2.0);
  w.x.resize(n + 1);
  w.y.resize(n + 1);
  w.v.resize(n + 1);
  w.theta.resize(n + 1);
  w.delta.resize(n + 1);
  w.a.assign(n, 0.0);
  w.omega.assign(n, 0.0);
  p.modes.assign(n, MotionMode::Ackermann);
  p.zt_sign.assign(n, 1.0);

  const auto locate = [&](double t, size_t& seg, double& frac) {
    seg = 0;
    while (seg + 1 < m - 1 && times[seg + 1] < t) ++seg;
    if (m == 1) {
      seg = 0;
      frac = 0.0;
      return;
    }
    const double t0 = times[seg], t1 = times[seg + 1];
    frac = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
    frac = std::clamp(frac, 0.0, 1.0);
  };

  for (int j = 0; j <= n; ++j) {
    const double t = total_time * j / n;
    if (m == 1) {
      const VehicleState& st = coarse.states[0].state;
      w.x[j] = st.x;
      w.y[j] = st.y;
      w.v[j] = 0.0;
      w.theta[j] = theta_unwrapped[0];
      w.delta[j] = st.delta;
      continue;
    }
    size_t seg;
    double frac;
    locate(t, seg, frac);
    const CoarseState& a = coarse.states[seg];
    const CoarseState& b = coarse.states[seg + 1];
    w.x[j] = a.state.x + frac * (b.state.x - a.state.x);
    w.y[j] = a.state.y + frac * (b.state.y - a.state.y);
    w.theta[j] = theta_unwrapped[seg] + frac * (theta_unwrapped[seg + 1] - theta_unwrapped[seg]);
    w.delta[j] = a.state.delta + frac * (b.state.delta - a.state.delta);
    w.v[j] = b.mode == MotionMode::ZeroTurn
                 ? 0.0
                 : warm_speed[seg] + frac * (warm_speed[seg + 1] - warm_speed[seg]);
  }
  for (int k = 0; k < n; ++k) {
    if (m == 1) break;
    const double t = total_time * (k + 0.5) / n;
    size_t seg;
    double frac;
    locate(t, seg, frac);
    const CoarseState& b = coarse.states[seg + 1];
    p.modes[k] = b.mode;
    if (b.mode == MotionMode::ZeroTurn) {
      const double dth = theta_unwrapped[seg + 1] - theta_unwrapped[seg];
      p.zt_sign[k] = dth >= 0.0 ? 1.0 : -1.0;
    }
  }

  p.one_sided.assign(n, 0);
  for (int k = 0; k + 1 < n; ++k) {
    if (p.modes[k] != p.modes[k + 1]) p.one_sided[k] = 1;
  }
  p.v_pinned.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) {
    if (p.modes[k] == MotionMode::ZeroTurn) {
      p.v_pinned[k] = 1;
      p.v_pinned[k + 1] = 1;
    }
  }
  for (int j = 0; j <= n; ++j) {
    if (p.v_pinned[j]) w.v[j] = 0.0;
  }
  p.delta_bound.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const MotionMode owner = p.modes[std::min(j, n - 1)];
    p.delta_bound[j] = owner == MotionMode::Ackermann ? params.max_steer : M_PI / 2.0;
    // Resampling at a mode switch can hand an Ackermann-owned sample the
    // neighboring crab angle, where tan() in the heading defect explodes.
    w.delta[j] = std::clamp(w.delta[j], -p.delta_bound[j], p.delta_bound[j]);
  }

  // Boundary states with theta unwrapped to the warm start's branch.
  p.s0 = s.init;
  p.sf = s.goal;
  p.s0.theta = w.theta[0] + angle_diff(s.init.theta, w.theta[0]);
  p.sf.theta = w.theta[n] + angle_diff(s.goal.theta, w.theta[n]);

  // Controls from finite differences of the warm states.
  const double dt = w.t_f / n;
  for (int k = 0; k < n; ++k) {
    w.a[k] = (w.v[k + 1] - w.v[k]) / dt;
    w.omega[k] = p.modes[k] == MotionMode::Ackermann ? (w.delta[k + 1] - w.delta[k]) / dt : 0.0;
    w.a[k] = std::clamp(w.a[k], -p.a_max, p.a_max);
    w.omega[k] = std::clamp(w.omega[k], -p.omega_max, p.omega_max);
  }
  w.modes = p.modes;

  // Corridors at every sample.
  std::vector<Point2> positions(n + 1), velocities(n + 1);
  for (int j = 0; j <= n; ++j) positions[j] = {w.x[j], w.y[j]};
  for (int j = 0; j <= n; ++j) {
    const int j2 = std::min(j + 1, n);
    const int j1 = j2 - 1;
    velocities[j] = {(w.x[j2] - w.x[j1]) / dt, (w.y[j2] - w.y[j1]) / dt};
  }
  std::vector<double> headings(n + 1);
  std::vector<double> bands(n + 1, M_PI / 18.0);
  for (int j = 0; j <= n; ++j) {
    headings[j] = w.theta[j];
    double swing = 0.0;
    if (j > 0) swing = std::max(swing, std::abs(w.theta[j] - w.theta[j - 1]));
    if (j < n) swing = std::max(swing, std::abs(w.theta[j + 1] - w.theta[j]));
    bands[j] = std::max(bands[j], swing);
  }
  const CorridorBuildResult built =
      build_corridors(positions, velocities, headings, bands, s, params, cfg.corridor, cfg.risk,
                      dt, cfg.use_risk_corridors);
  if (!built.ok) {
    std::ostringstream os;
    os << "corridor construction failed at sample " << built.failed_sample;
    out.error = os.str();
    return out;
  }
  p.corridors.resize(n + 1);
  for (int j = 0; j <= n; ++j) p.corridors[j] = corridor_constraints(built.corridors[j]);

  // Speed-window regions for obstacles the coarse path drives over.
  std::vector<uint8_t> has_region(s.statics.size(), 0);
  for (const CoarseState& cs : coarse.states) {
    for (const ObstacleDecision& d : cs.decisions) {
      if (d.action == DecisionAction::DriveOver) has_region[d.obstacle] = 1;
    }
  }
  for (size_t i = 0; i < s.statics.size(); ++i) {
    if (!has_region[i]) continue;
    DriveOverRegion r;
    r.obstacle = static_cast<int>(i);
    double xmin, ymin, xmax, ymax;
    s.statics[i].shape.bounds(xmin, ymin, xmax, ymax);
    r.xmin = xmin;
    r.xmax = xmax;
    r.ymin = ymin;
    r.ymax = ymax;
    r.v_lb = cfg.v_lb;
    r.v_ub = cfg.v_ub;
    p.regions.push_back(r);
  }

  p.warm = std::move(w);
  out.problem = std::move(p);
  return out;
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trajectory: cannot open " + path);
  out << "t\tx\ty\ttheta\tv\tdelta\ta\tomega\tmode\n";
  char buf[256];
  const double dt = traj.dt();
  for (int j = 0; j <= traj.n; ++j) {
    std::snprintf(buf, sizeof(buf), "%.6f\t%.9f\t%.9f\t%.9f\t%.9f\t%.9f\t%.9f\t%.9f\t%s\n",
                  j * dt, traj.x[j], traj.y[j], normalize_angle(traj.theta[j]), traj.v[j],
                  traj.delta[j], j < traj.n ? traj.a[j] : 0.0, j < traj.n ? traj.omega[j] : 0.0,
                  mode_name(traj.sample_mode(j)));
    out << buf;
  }
}

}  // namespace fwis
