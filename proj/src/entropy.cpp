#include "shrinker/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "shrinker/error.hpp"
#include "shrinker/parallel.hpp"
#include "shrinker/variation.hpp"

namespace shrinker {

DensityProbe::DensityProbe(const TriMesh& mesh, int order) : tail_(mesh.tail()) {
  const TriangleRule& rule = triangle_rule(order);
  node_.reserve(mesh.num_faces() * rule.weight.size());
  weight_.reserve(node_.capacity());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.face(f);
    const double a = mesh.face_area(f);
    for (std::size_t k = 0; k < rule.weight.size(); ++k) {
      const Vec3& b = rule.bary[k];
      node_.push_back(b[0] * mesh.vertex(t[0]) + b[1] * mesh.vertex(t[1]) + b[2] * mesh.vertex(t[2]));
      weight_.push_back(rule.weight[k] * a);
    }
  }
}

double DensityProbe::operator()(const DensityParams& p) const {
  const double c = 1 / (4 * p.t0);
  NeumaierSum s;
  for (std::size_t i = 0; i < node_.size(); ++i) s.add(weight_[i] * std::exp(-(node_[i] - p.x0).squaredNorm() * c));
  double v = s.value() / (4 * M_PI * p.t0);
  if (tail_) v += tail_density(*tail_, p.x0, p.t0);
  return v;
}

namespace {

struct Probe {
  DensityParams p;
  double value;
};

// Lexicographic on (value desc, x0, t0) for deterministic ties.
bool better(const Probe& a, const Probe& b) {
  if (a.value != b.value) return a.value > b.value;
  for (int k = 0; k < 3; ++k)
    if (a.p.x0[k] != b.p.x0[k]) return a.p.x0[k] < b.p.x0[k];
  return a.p.t0 < b.p.t0;
}

// BFGS ascent on F_{x0, exp(u3)} in u = (x0, log t0).
Probe refine(const TriMesh& mesh, const DensityParams& start, const EntropyOptions& o, int start_id,
             std::vector<EntropyTracePoint>& trace) {
  using V4 = Eigen::Vector4d;
  auto eval = [&](const V4& u, V4& grad) {
    DensityParams p{u.head<3>(), std::exp(u[3])};
    DensityGradient g = f_density_gradient(mesh, p, o.quad);
    grad << -g.d_x0, -g.d_log_t0;
    return -g.value;
  };
  V4 u;
  u << start.x0, std::log(start.t0);
  V4 g;
  double f = eval(u, g);
  Eigen::Matrix4d H = Eigen::Matrix4d::Identity();
  auto reset = [&] {
    H.setZero();
    const double t0 = std::exp(u[3]);
    H.diagonal() << 2 * t0, 2 * t0, 2 * t0, 1.0;
    H /= std::max(1e-12, std::abs(f));
  };
  reset();
  trace.push_back({{u.head<3>(), std::exp(u[3])}, -f, start_id});
  for (int it = 0; it < o.max_iterations; ++it) {
    const double t0 = std::exp(u[3]);
    const double gn = std::sqrt(t0 * g.head<3>().squaredNorm() + g[3] * g[3]);
    if (gn < o.refine_tol) break;
    V4 d = -H * g;
    if (!(g.dot(d) < 0)) {
      reset();
      d = -H * g;
    }
    // Keep steps moderate: at most one length scale in x0 and one unit in log t0.
    const double lim = std::max(d.head<3>().norm() / std::sqrt(t0), std::abs(d[3]));
    if (lim > 1) d /= lim;
    double step = 1;
    V4 un, gnew;
    double fn = f;
    bool ok = false;
    for (int bt = 0; bt < 40; ++bt) {
      un = u + step * d;
      fn = eval(un, gnew);
      if (fn <= f + 1e-4 * step * g.dot(d)) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    const V4 s = un - u, y = gnew - g;
    u = un;
    const double fold = f;
    f = fn;
    g = gnew;
    trace.push_back({{u.head<3>(), std::exp(u[3])}, -f, start_id});
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      const double r = 1 / sy;
      const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
      H = (I - r * s * y.transpose()) * H * (I - r * y * s.transpose()) + r * s * s.transpose();
    } else {
      reset();
    }
    if (std::abs(fold - f) <= 1e-15 * std::abs(f) && s.norm() < 1e-12) break;
  }
  return {{u.head<3>(), std::exp(u[3])}, -f};
}

}  // namespace

EntropyResult entropy(const TriMesh& mesh, const EntropyOptions& o) {
  if (o.grid_points < 1 || o.t_points < 1 || o.starts < 1)
    fail(ErrorCode::Parameter, "entropy", "grid sizes and starts must be positive");
  if (!(mesh.num_faces() > 0 && mesh.euclidean_area() > 0))
    fail(ErrorCode::Undefined, "entropy", "mesh has zero area");
  Vec3 lo, hi;
  mesh.bounding_box(lo, hi);
  const double diam = mesh.diameter();
  const double L = std::log(diam);
  const double ltmin = o.log_t_min.value_or(std::min(-2 * std::abs(L), 2 * L - 8));
  const double ltmax = o.log_t_max.value_or(std::max(2 * std::abs(L), 2 * L + 2));
  lo -= Vec3::Constant(o.inflate * diam);
  hi += Vec3::Constant(o.inflate * diam);

  const DensityProbe probe(mesh, 1);
  const int n = o.grid_points, nt = o.t_points;
  std::vector<Probe> grid(static_cast<std::size_t>(n) * n * n * nt);
  auto coord = [&](int i, int k) { return n == 1 ? 0.5 * (lo[k] + hi[k]) : lo[k] + (hi[k] - lo[k]) * i / (n - 1); };
  parallel_blocks(grid.size(), [&](std::size_t idx) {
    std::size_t r = idx;
    const int it = static_cast<int>(r % nt);
    r /= nt;
    const int iz = static_cast<int>(r % n);
    r /= n;
    const int iy = static_cast<int>(r % n);
    const int ix = static_cast<int>(r / n);
    DensityParams p{Vec3(coord(ix, 0), coord(iy, 1), coord(iz, 2)),
                    std::exp(nt == 1 ? 0.5 * (ltmin + ltmax) : ltmin + (ltmax - ltmin) * it / (nt - 1))};
    grid[idx] = {p, probe(p)};
  });
  std::sort(grid.begin(), grid.end(), better);

  EntropyResult res;
  res.starts_used = std::min<int>(o.starts, static_cast<int>(grid.size()));
  Probe best{{}, -1};
  for (int s = 0; s < res.starts_used; ++s) {
    Probe p = refine(mesh, grid[s].p, o, s, res.trace);
    if (best.value < 0 || better(p, best)) best = p;
  }
  res.lambda = best.value;
  res.argmax = best.p;
  return res;
}

CenterCheck shrinker_center_check(const TriMesh& mesh, const CenterGrid& g) {
  if (g.points < 1 || g.t_points < 1 || !(g.t_min > 0) || !(g.t_max >= g.t_min) || !(g.half_extent >= 0))
    fail(ErrorCode::Parameter, "entropy", "invalid center grid");
  CenterCheck c;
  c.residual_sup = shrinker_residual(mesh).sup;
  if (!(c.residual_sup < g.residual_gate)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "shrinker residual sup norm %.6g exceeds gate %.3g", c.residual_sup,
                  g.residual_gate);
    fail(ErrorCode::Precondition, "entropy", buf);
  }
  const DensityProbe probe(mesh, 7);
  c.value_at_origin = probe({Vec3::Zero(), 1.0});
  const int n = g.points, nt = g.t_points;
  std::vector<Probe> vals(static_cast<std::size_t>(n) * n * n * nt);
  auto coord = [&](int i) { return n == 1 ? 0.0 : -g.half_extent + 2 * g.half_extent * i / (n - 1); };
  const double l0 = std::log(g.t_min), l1 = std::log(g.t_max);
  parallel_blocks(vals.size(), [&](std::size_t idx) {
    std::size_t r = idx;
    const int it = static_cast<int>(r % nt);
    r /= nt;
    const int iz = static_cast<int>(r % n);
    r /= n;
    const int iy = static_cast<int>(r % n);
    const int ix = static_cast<int>(r / n);
    DensityParams p{Vec3(coord(ix), coord(iy), coord(iz)), std::exp(nt == 1 ? 0.0 : l0 + (l1 - l0) * it / (nt - 1))};
    vals[idx] = {p, probe(p)};
  });
  const Probe& m = *std::min_element(vals.begin(), vals.end(), better);
  c.grid_max = m.value;
  c.grid_argmax = m.p;
  c.pass = c.grid_max <= c.value_at_origin + g.tolerance;
  return c;
}

DilationReport dilation_monotonicity(const TriMesh& mesh, const Vec3& y, double a, const std::vector<double>& s,
                                     double tolerance, double residual_gate) {
  for (double si : s) {
    if (!(si > 0)) fail(ErrorCode::Parameter, "entropy", "dilation samples must be positive");
    if (!(1 + a * si * si > 0)) fail(ErrorCode::Parameter, "entropy", "1 + a s^2 must be positive at every sample");
  }
  DilationReport rep;
  rep.residual_sup = shrinker_residual(mesh).sup;
  if (!(rep.residual_sup < residual_gate)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "shrinker residual sup norm %.6g exceeds gate %.3g", rep.residual_sup,
                  residual_gate);
    fail(ErrorCode::Precondition, "entropy", buf);
  }
  auto g = [&](double si) { return f_density(mesh, {si * y, 1 + a * si * si}); };
  rep.pass = true;
  for (double si : s) {
    DilationSample d;
    d.s = si;
    const DensityParams p{si * y, 1 + a * si * si};
    const DensityGradient dg = f_density_gradient(mesh, p);
    d.g = dg.value;
    d.dg_analytic = dg.d_x0.dot(y) + dg.d_log_t0 * 2 * a * si / p.t0;
    double h = 1e-4 * si;
    if (1 + a * (si + h) * (si + h) <= 0 || 1 + a * (si - h) * (si - h) <= 0) h = 1e-6 * si;
    d.dg_fd = (g(si + h) - g(si - h)) / (2 * h);
    rep.pass = rep.pass && d.dg_fd <= tolerance;
    rep.samples.push_back(d);
  }
  return rep;
}

}  // namespace shrinker
