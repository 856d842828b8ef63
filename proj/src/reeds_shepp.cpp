#include "fwis/reeds_shepp.hpp"

#include <cmath>
#include <limits>

namespace fwis {

namespace {

constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();
const double kPi = M_PI;
const double kHalfPi = 0.5 * M_PI;

double mod2pi(double x) {
  double v = std::fmod(x, 2.0 * kPi);
  if (v < -kPi)
    v += 2.0 * kPi;
  else if (v > kPi)
    v -= 2.0 * kPi;
  return v;
}

void polar(double x, double y, double& r, double& theta) {
  r = std::sqrt(x * x + y * y);
  theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi, double& tau, double& omega) {
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

bool lp_sp_lp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) return true;
  }
  return false;
}

bool lp_sp_rp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1, u1;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

bool lp_rm_l(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double u1, theta;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

bool lp_rup_lum_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

bool lp_rum_lum_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -kHalfPi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

bool lp_rm_sm_lm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi);
  const double eta = y - 1.0 + std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - kHalfPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_sm_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + kHalfPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_s_lm_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi);
  const double eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

using Seg = RSSegment;

struct Candidate {
  std::array<Seg, 5> types;
  std::array<double, 5> lengths;
};

void consider(ReedsSheppPath& best, const std::array<Seg, 5>& types,
              const std::array<double, 5>& lengths) {
  double total = 0.0;
  for (double l : lengths) total += std::abs(l);
  if (total < best.total) {
    best.types = types;
    best.lengths = lengths;
    best.total = total;
  }
}

void csc(double x, double y, double phi, ReedsSheppPath& best) {
  double t, u, v;
  if (lp_sp_lp(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Left, Seg::None, Seg::None}, {t, u, v, 0, 0});
  if (lp_sp_lp(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Left, Seg::None, Seg::None},
             {-t, -u, -v, 0, 0});
  if (lp_sp_lp(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Right, Seg::None, Seg::None}, {t, u, v, 0, 0});
  if (lp_sp_lp(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Right, Seg::None, Seg::None},
             {-t, -u, -v, 0, 0});
  if (lp_sp_rp(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Right, Seg::None, Seg::None}, {t, u, v, 0, 0});
  if (lp_sp_rp(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Right, Seg::None, Seg::None},
             {-t, -u, -v, 0, 0});
  if (lp_sp_rp(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Left, Seg::None, Seg::None}, {t, u, v, 0, 0});
  if (lp_sp_rp(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Left, Seg::None, Seg::None},
             {-t, -u, -v, 0, 0});
}

void ccc(double x, double y, double phi, ReedsSheppPath& best) {
  double t, u, v;
  if (lp_rm_l(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::None, Seg::None}, {t, u, v, 0, 0});
  if (lp_rm_l(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::None, Seg::None}, {-t, -u, -v, 0, 0});
  if (lp_rm_l(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::None, Seg::None}, {t, u, v, 0, 0});
  if (lp_rm_l(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::None, Seg::None}, {-t, -u, -v, 0, 0});

  // Backwards variants solve the reversed problem and flip the segment order.
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (lp_rm_l(xb, yb, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::None, Seg::None}, {v, u, t, 0, 0});
  if (lp_rm_l(-xb, yb, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::None, Seg::None}, {-v, -u, -t, 0, 0});
  if (lp_rm_l(xb, -yb, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::None, Seg::None}, {v, u, t, 0, 0});
  if (lp_rm_l(-xb, -yb, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::None, Seg::None}, {-v, -u, -t, 0, 0});
}

void cccc(double x, double y, double phi, ReedsSheppPath& best) {
  double t, u, v;
  if (lp_rup_lum_rm(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::Right, Seg::None}, {t, u, -u, v, 0});
  if (lp_rup_lum_rm(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::Right, Seg::None}, {-t, -u, u, -v, 0});
  if (lp_rup_lum_rm(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::Left, Seg::None}, {t, u, -u, v, 0});
  if (lp_rup_lum_rm(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::Left, Seg::None}, {-t, -u, u, -v, 0});

  if (lp_rum_lum_rp(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::Right, Seg::None}, {t, u, u, v, 0});
  if (lp_rum_lum_rp(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Left, Seg::Right, Seg::None}, {-t, -u, -u, -v, 0});
  if (lp_rum_lum_rp(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::Left, Seg::None}, {t, u, u, v, 0});
  if (lp_rum_lum_rp(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Right, Seg::Left, Seg::None}, {-t, -u, -u, -v, 0});
}

void ccsc(double x, double y, double phi, ReedsSheppPath& best) {
  double t, u, v;
  if (lp_rm_sm_lm(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Straight, Seg::Left, Seg::None},
             {t, -kHalfPi, u, v, 0});
  if (lp_rm_sm_lm(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Straight, Seg::Left, Seg::None},
             {-t, kHalfPi, -u, -v, 0});
  if (lp_rm_sm_lm(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Straight, Seg::Right, Seg::None},
             {t, -kHalfPi, u, v, 0});
  if (lp_rm_sm_lm(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Straight, Seg::Right, Seg::None},
             {-t, kHalfPi, -u, -v, 0});

  if (lp_rm_sm_rm(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Straight, Seg::Right, Seg::None},
             {t, -kHalfPi, u, v, 0});
  if (lp_rm_sm_rm(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Straight, Seg::Right, Seg::None},
             {-t, kHalfPi, -u, -v, 0});
  if (lp_rm_sm_rm(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Straight, Seg::Left, Seg::None},
             {t, -kHalfPi, u, v, 0});
  if (lp_rm_sm_rm(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Straight, Seg::Left, Seg::None},
             {-t, kHalfPi, -u, -v, 0});

  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (lp_rm_sm_lm(xb, yb, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Right, Seg::Left, Seg::None},
             {v, u, -kHalfPi, t, 0});
  if (lp_rm_sm_lm(-xb, yb, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Right, Seg::Left, Seg::None},
             {-v, -u, kHalfPi, -t, 0});
  if (lp_rm_sm_lm(xb, -yb, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Left, Seg::Right, Seg::None},
             {v, u, -kHalfPi, t, 0});
  if (lp_rm_sm_lm(-xb, -yb, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Left, Seg::Right, Seg::None},
             {-v, -u, kHalfPi, -t, 0});

  if (lp_rm_sm_rm(xb, yb, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Right, Seg::Left, Seg::None},
             {v, u, -kHalfPi, t, 0});
  if (lp_rm_sm_rm(-xb, yb, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Straight, Seg::Right, Seg::Left, Seg::None},
             {-v, -u, kHalfPi, -t, 0});
  if (lp_rm_sm_rm(xb, -yb, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Left, Seg::Right, Seg::None},
             {v, u, -kHalfPi, t, 0});
  if (lp_rm_sm_rm(-xb, -yb, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Straight, Seg::Left, Seg::Right, Seg::None},
             {-v, -u, kHalfPi, -t, 0});
}

void ccscc(double x, double y, double phi, ReedsSheppPath& best) {
  double t, u, v;
  if (lp_rm_s_lm_rp(x, y, phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Straight, Seg::Left, Seg::Right},
             {t, -kHalfPi, u, -kHalfPi, v});
  if (lp_rm_s_lm_rp(-x, y, -phi, t, u, v))
    consider(best, {Seg::Left, Seg::Right, Seg::Straight, Seg::Left, Seg::Right},
             {-t, kHalfPi, -u, kHalfPi, -v});
  if (lp_rm_s_lm_rp(x, -y, -phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Straight, Seg::Right, Seg::Left},
             {t, -kHalfPi, u, -kHalfPi, v});
  if (lp_rm_s_lm_rp(-x, -y, phi, t, u, v))
    consider(best, {Seg::Right, Seg::Left, Seg::Straight, Seg::Right, Seg::Left},
             {-t, kHalfPi, -u, kHalfPi, -v});
}

}  // namespace

ReedsSheppPath reeds_shepp_shortest(const Pose2& from, const Pose2& to, double radius) {
  // Normalize: start at the origin facing +x, distances in turn radii.
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double c = std::cos(from.theta), s = std::sin(from.theta);
  const double x = (c * dx + s * dy) / radius;
  const double y = (-s * dx + c * dy) / radius;
  const double phi = normalize_angle(to.theta - from.theta);

  ReedsSheppPath best;
  best.total = std::numeric_limits<double>::infinity();
  csc(x, y, phi, best);
  ccc(x, y, phi, best);
  cccc(x, y, phi, best);
  ccsc(x, y, phi, best);
  ccscc(x, y, phi, best);
  return best;
}

namespace {

Pose2 advance(const Pose2& p, RSSegment type, double w) {
  // w is the signed normalized parameter consumed on this segment.
  Pose2 out = p;
  switch (type) {
    case RSSegment::Straight:
      out.x += w * std::cos(p.theta);
      out.y += w * std::sin(p.theta);
      break;
    case RSSegment::Left:
      out.x += std::sin(p.theta + w) - std::sin(p.theta);
      out.y += -std::cos(p.theta + w) + std::cos(p.theta);
      out.theta = p.theta + w;
      break;
    case RSSegment::Right:
      out.x += -std::sin(p.theta - w) + std::sin(p.theta);
      out.y += std::cos(p.theta - w) - std::cos(p.theta);
      out.theta = p.theta - w;
      break;
    default: break;
  }
  return out;
}

}  // namespace

RSSample reeds_shepp_sample(const Pose2& from, const ReedsSheppPath& path, double radius,
                            double s) {
  double remaining = std::clamp(s / radius, 0.0, path.total);
  Pose2 scaled{from.x / radius, from.y / radius, from.theta};
  RSSample out;
  out.direction = 1.0;
  for (int i = 0; i < 5; ++i) {
    if (path.types[i] == RSSegment::None) break;
    const double seg = path.lengths[i];
    const double mag = std::abs(seg);
    if (mag < 1e-15) continue;
    const double sign = seg >= 0 ? 1.0 : -1.0;
    const double take = std::min(remaining, mag);
    scaled = advance(scaled, path.types[i], sign * take);
    out.direction = sign;
    if (path.types[i] == RSSegment::Left)
      out.kappa = 1.0 / radius;
    else if (path.types[i] == RSSegment::Right)
      out.kappa = -1.0 / radius;
    else
      out.kappa = 0.0;
    remaining -= take;
    if (remaining <= 1e-15) break;
  }
  out.pose = {scaled.x * radius, scaled.y * radius, normalize_angle(scaled.theta)};
  return out;
}

std::vector<RSSample> reeds_shepp_discretize(const Pose2& from, const ReedsSheppPath& path,
                                             double radius, double ds) {
  const double total = path.length(radius);
  const int n = std::max(1, static_cast<int>(std::ceil(total / ds)));
  std::vector<RSSample> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    out.push_back(reeds_shepp_sample(from, path, radius, total * i / n));
  }
  return out;
}

}  // namespace fwis
