#include "shrinker/radial_flow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "shrinker/error.hpp"

namespace shrinker {

RadialField radial_field(const CutoffSpec& spec) {
  RadialField out{VectorFieldSpec::radial(spec), 0};
  const Vec3 dirs[3] = {Vec3::UnitX(), Vec3(1, 1, 1).normalized(), Vec3(-0.3, 0.8, 0.52).normalized()};
  const int n = 20000;
  for (const Vec3& d : dirs)
    for (int i = 0; i <= n; ++i) {
      const double r = spec.rho * (1 + 2.0 * i / n);  // [rho, 3 rho]; beyond, ||DX|| = 1/r^2
      const FieldJet j = evaluate_field(out.field, r * d);
      out.c1_norm = std::max(out.c1_norm, Eigen::JacobiSVD<Eigen::Matrix3d>(j.jacobian).singularValues()(0));
    }
  return out;
}

double gaussian_divergence(const CutoffSpec& spec, const Vec3& x, const Vec3& unit_normal) {
  spec.validate();
  const double r = x.norm();
  if (!(r > 0)) fail(ErrorCode::Domain, "radial-flow", "divergence undefined at the origin");
  if (r <= spec.rho) return 0.0;
  CutoffProfile phi(spec.epsilon);
  const double s = r / spec.rho, c = x.dot(unit_normal) / r;
  return phi.value(s) * (2 * c * c / (r * r) - 0.5) + s * phi.slope(s) * (1 - c * c) / (r * r);
}

namespace {

// Radius and d(radius)/d(r0) after time t under r' = g(r) = phi(r/rho)/r.
// For an autonomous scalar flow dr/dr0 = g(r)/g(r0), so only r needs integrating.
void radial_orbit(double t, double r0, const std::optional<CutoffSpec>& spec, double& r, double& dr) {
  if (!spec) {
    r = std::sqrt(r0 * r0 + 2 * t);
    dr = r0 / r;
    return;
  }
  const double rho = spec->rho;
  r = r0;
  dr = 1;
  if (r0 <= rho || t == 0) return;
  CutoffProfile phi(spec->epsilon);
  auto g = [&](double rr) { return phi.value(rr / rho) / rr; };
  auto rk4 = [&](double rr, double h) {
    const double k1 = g(rr), k2 = g(rr + 0.5 * h * k1), k3 = g(rr + 0.5 * h * k2), k4 = g(rr + h * k3);
    return rr + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  };
  const double edge = 2 * rho;
  // Keep each step well inside one ramp: |dr| <= rho * delta / 16.
  const double hmax = std::min(0.01, phi.ramp_width() / 16) * rho * rho;
  double rem = t;
  while (rem > 0 && r < edge) {
    const double h = std::min(rem, hmax);
    const double rn = rk4(r, h);
    if (rn <= edge) {
      r = rn;
      rem -= h;
      continue;
    }
    // Land on the annulus edge: Newton on the step length.
    double hb = h * (edge - r) / (rn - r);
    for (int it = 0; it < 4; ++it) hb += (edge - rk4(r, hb)) / g(edge);
    hb = std::clamp(hb, 0.0, h);
    r = edge;
    rem -= hb;
  }
  if (rem > 0) r = std::sqrt(r * r + 2 * rem);
  const double g0 = g(r0);
  dr = (r == r0 || !(g0 > 0)) ? 1.0 : g(r) / g0;
}

}  // namespace

Vec3 radial_flow_map(double t, const Vec3& x, const std::optional<CutoffSpec>& spec) {
  if (!(t >= 0)) fail(ErrorCode::Parameter, "radial-flow", "flow time must be non-negative");
  if (spec) spec->validate();
  const double r0 = x.norm();
  if (!spec && !(r0 > 0)) fail(ErrorCode::Domain, "radial-flow", "pure field undefined at the origin");
  if (t == 0 || (spec && r0 <= spec->rho)) return x;
  double r, dr;
  radial_orbit(t, r0, spec, r, dr);
  return (r / r0) * x;
}

FlowJacobian flow_jacobian(double t, const Vec3& x, const Vec3& unit_normal, const std::optional<CutoffSpec>& spec) {
  if (!(t >= 0)) fail(ErrorCode::Parameter, "radial-flow", "flow time must be non-negative");
  const double r0 = x.norm();
  if (!(r0 > 0)) fail(ErrorCode::Domain, "radial-flow", "jacobian undefined at the origin");
  FlowJacobian j;
  if (t == 0) return j;
  double r, dr;
  radial_orbit(t, r0, spec, r, dr);
  const double a = r / r0, b = dr;
  const double c = std::min(1.0, std::abs(x.dot(unit_normal)) / r0);
  j.tangential_stretch = a;
  j.radial_stretch = b;
  j.euclidean = a * std::sqrt(b * b * (1 - c * c) + a * a * c * c);
  j.gaussian = j.euclidean * std::exp(-(r * r - r0 * r0) / 4);
  return j;
}

PushforwardArea pushforward_area(const TriMesh& mesh, double t, const CutoffSpec& spec, const QuadratureSpec& q) {
  spec.validate();
  if (!(t >= 0)) fail(ErrorCode::Parameter, "radial-flow", "flow time must be non-negative");
  PushforwardArea out;
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  BallClip breaks;
  breaks.breaks = field_breaks(VectorFieldSpec::radial(spec));
  const std::optional<CutoffSpec> sp = spec;
  // rho(f x) J_E dA = rho(x) dA * J^G.
  auto fn = [&](std::size_t f, const Vec3&, const Vec3& x, double wd, std::array<NeumaierSum, 1>& acc) {
    if (x.norm() <= spec.rho) {
      acc[0].add(wd);
      return;
    }
    acc[0].add(wd * flow_jacobian(t, x, mesh.face_normal(f), sp).gaussian);
  };
  out.jacobian_path = integrate_mesh<1>(mesh, w, q, fn, breaks)[0];
  std::vector<Vec3> v;
  v.reserve(mesh.num_vertices());
  for (const Vec3& x : mesh.vertices()) v.push_back(radial_flow_map(t, x, sp));
  const TriMesh moved = mesh.with_vertices(std::move(v));
  auto fg = [](std::size_t, const Vec3&, const Vec3&, double wd, std::array<NeumaierSum, 1>& acc) { acc[0].add(wd); };
  out.mesh_path = integrate_mesh<1>(moved, w, q, fg)[0];
  return out;
}

double radial_first_variation(const TriMesh& mesh, const CutoffSpec& spec, const QuadratureSpec& q) {
  spec.validate();
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  BallClip breaks;
  breaks.breaks = field_breaks(VectorFieldSpec::radial(spec));
  auto fn = [&](std::size_t f, const Vec3&, const Vec3& x, double wd, std::array<NeumaierSum, 1>& acc) {
    if (x.norm() <= spec.rho) return;
    acc[0].add(gaussian_divergence(spec, x, mesh.face_normal(f)) * wd);
  };
  return integrate_mesh<1>(mesh, w, q, fn, breaks)[0];
}

Eigen::Vector4d stereographic_lift(const Vec3& x) {
  const double n2 = x.squaredNorm();
  Eigen::Vector4d y;
  y << 2 * x / (1 + n2), (n2 - 1) / (n2 + 1);
  return y;
}

}  // namespace shrinker
