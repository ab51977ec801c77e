#include "shrinker/tail.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Geometry>

#include "shrinker/error.hpp"
#include "shrinker/geometry.hpp"

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// erfc(a) - erfc(b) for a <= b without cancellation in the far tails.
double erfc_diff(double a, double b) {
  if (a >= b) return 0.0;
  if (a >= 0) return std::erfc(a) - (std::isinf(b) ? 0.0 : std::erfc(b));
  if (b <= 0) return std::erfc(-b) - (std::isinf(a) ? 0.0 : std::erfc(-a));
  return std::erf(b) - std::erf(a);
}

// [a, inf) minus the open interval (-sqrt(D), sqrt(D)).
int segments(double a, double D, double lo[2], double hi[2]) {
  if (!(D > 0)) {
    lo[0] = a;
    hi[0] = kInf;
    return 1;
  }
  const double r = std::sqrt(D);
  int n = 0;
  if (a < -r) {
    lo[n] = a;
    hi[n] = -r;
    ++n;
  }
  lo[n] = std::max(a, r);
  hi[n] = kInf;
  return n + 1;
}

// Integral of (u + mu) exp(-u^2/(4 t0)) over the segments.
double radial_piece(double a, double mu, double t0, double D) {
  double lo[2], hi[2];
  int n = segments(a, D, lo, hi);
  const double sq = 2 * std::sqrt(t0);
  double s = 0;
  for (int k = 0; k < n; ++k) {
    double ea = std::exp(-lo[k] * lo[k] / (4 * t0));
    double eb = std::isinf(hi[k]) ? 0.0 : std::exp(-hi[k] * hi[k] / (4 * t0));
    s += 2 * t0 * (ea - eb) + mu * std::sqrt(kPi * t0) * erfc_diff(lo[k] / sq, hi[k] / sq);
  }
  return s;
}

// Integral of exp(-u^2/(4 t0)) over the segments.
double gauss_piece(double a, double t0, double D) {
  double lo[2], hi[2];
  int n = segments(a, D, lo, hi);
  const double sq = 2 * std::sqrt(t0);
  double s = 0;
  for (int k = 0; k < n; ++k) s += std::sqrt(kPi * t0) * erfc_diff(lo[k] / sq, hi[k] / sq);
  return s;
}

int angular_points(double sharpness, bool restricted) {
  // Periodic trapezoid: resolve the angular width ~ 1/sqrt(sharpness).
  double n = 64 + 24 * std::sqrt(std::max(sharpness, 0.0));
  if (restricted) n = std::max(n, 4096.0);
  return static_cast<int>(std::min(n, 262144.0));
}

double plane_tail(const PlaneTail& p, const Vec3& x0, double t0, std::optional<double> rb) {
  const Vec3 n = p.normal.normalized();
  Vec3 e1, e2;
  orthonormal_frame(n, e1, e2);
  const Vec3 d = x0 - p.center;
  const double c = d.dot(n);
  const double qx = d.dot(e1), qy = d.dot(e2);
  const double s = std::hypot(qx, qy);
  const double pre = std::exp(-c * c / (4 * t0)) / (4 * kPi * t0);
  if (pre == 0) return 0.0;
  const int N = angular_points(s * s / (4 * t0) + s * p.radius / t0, rb.has_value());
  double sum = 0;
  for (int k = 0; k < N; ++k) {
    double th = 2 * kPi * (k + 0.5) / N;
    double mu = s * std::cos(th), nu = s * std::sin(th);
    double D = rb ? (*rb) * (*rb) - c * c - nu * nu : -1.0;
    sum += std::exp(-nu * nu / (4 * t0)) * radial_piece(p.radius - mu, mu, t0, D);
  }
  return pre * sum * (2 * kPi / N);
}

double cylinder_tail(const CylinderTail& cy, const Vec3& x0, double t0, std::optional<double> rb) {
  const Vec3 a = cy.axis.normalized();
  Vec3 e1, e2;
  orthonormal_frame(a, e1, e2);
  const Vec3 d = x0 - cy.center;
  const double c = d.dot(a);
  const double s = std::hypot(d.dot(e1), d.dot(e2));
  const double R = cy.radius;
  const double base = std::exp(-(R - s) * (R - s) / (4 * t0));
  if (base == 0 && !rb) return 0.0;
  const int N = angular_points(R * s / (2 * t0), rb.has_value());
  double sum = 0;
  for (int k = 0; k < N; ++k) {
    double th = 2 * kPi * (k + 0.5) / N;
    double rho2 = R * R + s * s - 2 * R * s * std::cos(th);
    double ang = std::exp(-rho2 / (4 * t0));
    if (ang == 0) continue;
    double D = rb ? (*rb) * (*rb) - rho2 : -1.0;
    double J = gauss_piece(cy.half_length - c, t0, D) + gauss_piece(cy.half_length + c, t0, D);
    sum += ang * J;
  }
  return R * sum * (2 * kPi / N) / (4 * kPi * t0);
}

}  // namespace

double tail_density(const AnalyticTail& tail, const Vec3& x0, double t0, std::optional<double> outside_radius) {
  if (!(t0 > 0)) fail(ErrorCode::Parameter, "gaussian-measure", "t0 must be positive");
  if (std::holds_alternative<PlaneTail>(tail))
    return plane_tail(std::get<PlaneTail>(tail), x0, t0, outside_radius);
  return cylinder_tail(std::get<CylinderTail>(tail), x0, t0, outside_radius);
}

AnalyticTail transform_tail(const AnalyticTail& tail, const Vec3& t, double s) {
  if (std::holds_alternative<PlaneTail>(tail)) {
    PlaneTail p = std::get<PlaneTail>(tail);
    p.center = s * (p.center - t);
    p.radius *= s;
    return p;
  }
  CylinderTail c = std::get<CylinderTail>(tail);
  c.center = s * (c.center - t);
  c.radius *= s;
  c.half_length *= s;
  return c;
}

AnalyticTail rigid_transform_tail(const AnalyticTail& tail, const Eigen::Matrix3d& R, const Vec3& b) {
  if (std::holds_alternative<PlaneTail>(tail)) {
    PlaneTail p = std::get<PlaneTail>(tail);
    p.center = R * p.center + b;
    p.normal = R * p.normal;
    return p;
  }
  CylinderTail c = std::get<CylinderTail>(tail);
  c.center = R * c.center + b;
  c.axis = R * c.axis;
  return c;
}

}  // namespace shrinker
