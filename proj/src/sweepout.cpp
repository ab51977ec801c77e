#include "shrinker/sweepout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "shrinker/differential.hpp"
#include "shrinker/entropy.hpp"
#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/geometry.hpp"
#include "shrinker/parallel.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/topology.hpp"

namespace shrinker {

namespace {

constexpr double kEmpty = 1e-12;

void check_tau(double tau) {
  if (!(tau >= 0 && tau <= 1)) fail(ErrorCode::Parameter, "sweepout", "tau must lie in [0, 1]");
}

// cot(pi a / 2) with a in [0, 1]; infinite at 0.
double cot_half_pi(double a) { return a > 0 ? 1 / std::tan(M_PI * a / 2) : INFINITY; }

Slice plane_slice(const Vec3& n, double offset) {
  Slice s;
  if (!std::isfinite(offset) || std::exp(-offset * offset / 4) < kEmpty) return s;
  s.kind = Slice::Kind::Plane;
  s.normal = n;
  s.offset = offset;
  return s;
}

// Offset-sphere closed form: radius R, center at distance d from the origin.
double sphere_area_closed(double R, double d) {
  if (d < 1e-9 * std::max(R, 1.0)) return R * R * std::exp(-R * R / 4);
  return R / d * (std::exp(-(d - R) * (d - R) / 4) - std::exp(-(d + R) * (d + R) / 4));
}

}  // namespace

double dilation_of(double tau) {
  check_tau(tau);
  if (tau == 1) return INFINITY;
  return std::tan(M_PI * tau / 2);
}

double slice_area(const Slice& s, const QuadratureSpec& q) {
  switch (s.kind) {
    case Slice::Kind::Empty:
      return 0;
    case Slice::Kind::Plane:
      return std::exp(-s.offset * s.offset / 4);
    case Slice::Kind::Mesh:
      return gaussian_area(s.mesh, q).value;
  }
  return 0;
}

struct SweepoutFamily::Shared {
  std::vector<Vec3> normal;  // vertex normals (canonical)
  std::unique_ptr<DensityProbe> probe;
  TriMesh unit_sphere;       // sphere families
};

SweepoutFamily SweepoutFamily::canonical(const TriMesh& mesh, double epsilon) {
  if (mesh.num_faces() == 0) fail(ErrorCode::Parameter, "sweepout", "canonical family needs a nonempty mesh");
  if (!(epsilon > 0)) fail(ErrorCode::Parameter, "sweepout", "collar width must be positive");
  const DifferentialData d = differential_data(mesh);
  double amax = 0;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    if (d.reliable[i]) amax = std::max(amax, std::sqrt(d.second_fundamental_sq[i]));
  if (amax > 0 && !(epsilon < 0.5 / amax)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "collar width %.4g not below half the focal distance %.4g", epsilon, 1 / amax);
    fail(ErrorCode::Collar, "sweepout", buf);
  }
  SweepoutFamily f;
  f.kind_ = Kind::Canonical;
  f.epsilon_ = epsilon;
  f.mesh_ = std::make_shared<const TriMesh>(mesh);
  auto sh = std::make_shared<Shared>();
  sh->normal = d.normal;
  sh->probe = std::make_unique<DensityProbe>(mesh, 7);
  f.shared_ = sh;
  return f;
}

SweepoutFamily SweepoutFamily::plane_family() {
  SweepoutFamily f;
  f.kind_ = Kind::PlaneFamily;
  f.shared_ = std::make_shared<Shared>();
  f.mesh_ = std::make_shared<const TriMesh>();
  return f;
}

SweepoutFamily SweepoutFamily::sphere_family(int refinement) {
  SweepoutFamily f;
  f.kind_ = Kind::SphereFamily;
  auto sh = std::make_shared<Shared>();
  sh->unit_sphere = unit_icosphere(refinement);
  f.shared_ = sh;
  f.mesh_ = std::make_shared<const TriMesh>(sh->unit_sphere);
  return f;
}

SweepoutFamily SweepoutFamily::translated_sphere_family(double shift, int refinement) {
  if (!(shift > 0)) fail(ErrorCode::Parameter, "sweepout", "translation scale must be positive");
  SweepoutFamily f = sphere_family(refinement);
  f.kind_ = Kind::TranslatedSphereFamily;
  f.shift_ = shift;
  return f;
}

SweepoutFamily::Collar SweepoutFamily::collar(const Vec3& t, double tau) const {
  if (kind_ != Kind::Canonical) fail(ErrorCode::Unsupported, "sweepout", "collar coordinates need the canonical family");
  check_tau(tau);
  const TriMesh& m = *mesh_;
  Collar c;
  double best = INFINITY;
  Vec3 bary_best;
  std::size_t f_best = 0;
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    const Face& fc = m.face(f);
    Vec3 bary;
    const Vec3 q = closest_point_on_triangle(t, m.vertex(fc[0]), m.vertex(fc[1]), m.vertex(fc[2]), bary);
    const double d2 = (q - t).squaredNorm();
    if (d2 < best) {
      best = d2;
      c.p = q;
      bary_best = bary;
      f_best = f;
    }
  }
  const Face& fc = m.face(f_best);
  const auto& nv = shared_->normal;
  Vec3 n = bary_best[0] * nv[fc[0]] + bary_best[1] * nv[fc[1]] + bary_best[2] * nv[fc[2]];
  n = n.norm() > 0 ? Vec3(n.normalized()) : m.face_normal(f_best);
  c.normal = n;
  const double dist = std::sqrt(best);
  c.rho = (t - c.p).dot(n) > 0 ? -dist : dist;
  c.radius = std::hypot(c.rho, 1 - tau);
  return c;
}

Slice SweepoutFamily::canonical_resolve(const Vec3& t, double tau) const {
  check_tau(tau);
  const double eps = epsilon_;
  auto dilate = [](const Vec3& center, double s) {
    Slice sl;
    sl.kind = Slice::Kind::Mesh;
    sl.center = center;
    sl.dilation = s;
    return sl;
  };
  if (1 - tau < 2 * eps) {
    const Collar c = collar(t, tau);
    if (c.radius < 2 * eps) {
      if (c.radius <= 1e-12 * eps) return plane_slice(c.normal, 0.0);
      const double dr = c.rho / c.radius, da = (1 - tau) / c.radius;
      if (da == 0) return Slice{};  // tau = 1 off the surface
      // Leaf through the inner boundary point in the same direction.
      const double Cb = eps * dr * cot_half_pi(eps * da);
      if (c.radius < eps) return plane_slice(c.normal, Cb);
      const double u = (c.radius - eps) / eps;
      const double Co = 2 * eps * dr * cot_half_pi(2 * eps * da);
      const double C = (1 - u) * Cb + u * Co;
      const double r = 2 * eps * u;
      if (r == 0) return plane_slice(c.normal, Cb);
      // Point at radius r on the leaf rho = C tan(pi a / 2), a = 1 - tau.
      double lo = 0, hi = std::min(r, 0.999);
      for (int it = 0; it < 100; ++it) {
        const double a = 0.5 * (lo + hi);
        const double rho = C * std::tan(M_PI * a / 2);
        (a * a + rho * rho > r * r ? hi : lo) = a;
      }
      const double a = 0.5 * (lo + hi);
      const double rho = C * std::tan(M_PI * a / 2);
      const Vec3 t2 = c.rho != 0 ? Vec3(c.p + (rho / c.rho) * (t - c.p)) : Vec3(c.p - rho * c.normal);
      return dilate(t2, cot_half_pi(a));
    }
  }
  if (tau == 0 || tau == 1) return Slice{};
  return dilate(t, std::tan(M_PI * tau / 2));
}

Slice SweepoutFamily::sphere_slice(double tau) const {
  check_tau(tau);
  if (tau == 0 || tau == 1) return Slice{};
  const double R = std::tan(M_PI * tau / 2);
  const double sh = kind_ == Kind::TranslatedSphereFamily ? shift_ : 1.0;
  const Vec3 c = kind_ == Kind::TranslatedSphereFamily ? Vec3(-shift_, 0, 0) : Vec3::Zero();
  std::vector<Vec3> v;
  v.reserve(shared_->unit_sphere.num_vertices());
  for (const Vec3& u : shared_->unit_sphere.vertices()) v.push_back(c + sh * R * u);
  Slice s;
  s.kind = Slice::Kind::Mesh;
  s.mesh = shared_->unit_sphere.with_vertices(std::move(v));
  s.center = Vec3::Zero();
  s.dilation = 1;
  return s;
}

Slice SweepoutFamily::slice(const Vec3& t, double tau) const {
  switch (kind_) {
    case Kind::PlaneFamily: {
      check_tau(tau);
      if (tau == 0 || tau == 1) return Slice{};
      return plane_slice(Vec3::UnitZ(), std::tan(M_PI * (tau - 0.5)));
    }
    case Kind::SphereFamily:
    case Kind::TranslatedSphereFamily: {
      Slice s = sphere_slice(tau);
      if (s.kind == Slice::Kind::Mesh && gaussian_area(s.mesh).value < kEmpty) return Slice{};
      return s;
    }
    case Kind::Canonical: {
      Slice s = canonical_resolve(t, tau);
      if (s.kind != Slice::Kind::Mesh) return s;
      if (f_density(*mesh_, {s.center, 1 / (s.dilation * s.dilation)}) < kEmpty) return Slice{};
      s.mesh = translate_dilate(*mesh_, s.center, s.dilation);
      return s;
    }
  }
  return {};
}

double SweepoutFamily::area(const Vec3& t, double tau, const QuadratureSpec& q) const {
  if (kind_ == Kind::Canonical) {
    const Slice s = canonical_resolve(t, tau);
    if (s.kind != Slice::Kind::Mesh) return slice_area(s);
    // F(s (Sigma - t)) = F_{t, 1/s^2}(Sigma).
    const double v = f_density(*mesh_, {s.center, 1 / (s.dilation * s.dilation)}, q);
    return v < kEmpty ? 0.0 : v;
  }
  if (kind_ == Kind::PlaneFamily) return slice_area(slice(t, tau));
  const Slice s = sphere_slice(tau);
  if (s.kind == Slice::Kind::Empty) return 0;
  const double v = gaussian_area(s.mesh, q).value;
  return v < kEmpty ? 0.0 : v;
}

double SweepoutFamily::coarse_area(const Vec3& t, double tau) const {
  if (kind_ != Kind::Canonical) return area(t, tau);
  const Slice s = canonical_resolve(t, tau);
  if (s.kind != Slice::Kind::Mesh) return slice_area(s);
  const double v = (*shared_->probe)({s.center, 1 / (s.dilation * s.dilation)});
  return v < kEmpty ? 0.0 : v;
}

std::optional<double> SweepoutFamily::analytic_area(double tau) const {
  check_tau(tau);
  switch (kind_) {
    case Kind::PlaneFamily:
      if (tau == 0 || tau == 1) return 0.0;
      return std::exp(-std::pow(std::tan(M_PI * (tau - 0.5)), 2) / 4);
    case Kind::SphereFamily:
    case Kind::TranslatedSphereFamily: {
      if (tau == 0 || tau == 1) return 0.0;
      const double R = std::tan(M_PI * tau / 2);
      return kind_ == Kind::SphereFamily ? sphere_area_closed(R, 0) : sphere_area_closed(shift_ * R, shift_);
    }
    case Kind::Canonical:
      return std::nullopt;
  }
  return std::nullopt;
}

double SweepoutFamily::enclosed_volume(const Vec3& t, double tau, long long samples, std::uint64_t seed) const {
  Slice s = kind_ == Kind::Canonical ? canonical_resolve(t, tau) : slice(t, tau);
  switch (s.kind) {
    case Slice::Kind::Plane:
      return 1 - halfspace_volume(s.offset);
    case Slice::Kind::Empty:
      if (kind_ == Kind::Canonical && tau > 0.5) return collar(t, tau).rho > 0 ? 1.0 : 0.0;
      return tau > 0.5 ? 1.0 : 0.0;
    case Slice::Kind::Mesh:
      if (kind_ == Kind::Canonical) s.mesh = translate_dilate(*mesh_, s.center, s.dilation);
      return gaussian_enclosed_volume(s.mesh, samples, seed).value;
  }
  return 0;
}

Slice canonical_slice(const TriMesh& mesh, const Vec3& t, double tau, double epsilon) {
  return SweepoutFamily::canonical(mesh, epsilon).slice(t, tau);
}

namespace {

// Larger area wins; ties go to the lexicographically smaller parameters.
bool better(const WidthSample& a, const WidthSample& b) {
  if (a.area != b.area) return a.area > b.area;
  return std::make_tuple(a.t.x(), a.t.y(), a.t.z(), a.tau) < std::make_tuple(b.t.x(), b.t.y(), b.t.z(), b.tau);
}

template <class Fn>
void evaluate_all(std::vector<WidthSample>& pts, const Fn& fn) {
  const std::size_t block = 16;
  const std::size_t nb = (pts.size() + block - 1) / block;
  parallel_blocks(nb, [&](std::size_t b) {
    for (std::size_t i = b * block; i < std::min(pts.size(), (b + 1) * block); ++i) pts[i].area = fn(pts[i]);
  });
}

}  // namespace

WidthReport width_upper_bound(const SweepoutFamily& family, const WidthGrid& grid) {
  if (grid.tau_points < 2 || grid.t_points < 1 || grid.refine_factor < 0 || grid.rescore < 1)
    fail(ErrorCode::Parameter, "sweepout", "invalid width grid");
  grid.quad.validate();
  WidthReport rep;
  rep.grid = grid;
  const double dtau = 1.0 / (grid.tau_points - 1);
  rep.tau_step = dtau;
  Vec3 lo = Vec3::Zero(), hi = Vec3::Zero(), step = Vec3::Zero();
  const bool spatial = family.uses_center();
  if (spatial) {
    family.mesh().bounding_box(lo, hi);
    const double pad = grid.inflate * family.mesh().diameter();
    lo.array() -= pad;
    hi.array() += pad;
    if (grid.t_points > 1) step = (hi - lo) / (grid.t_points - 1);
  }
  const int nt = spatial ? grid.t_points : 1;
  auto axis = [&](int i, int k) { return nt == 1 ? 0.5 * (lo[k] + hi[k]) : lo[k] + i * step[k]; };
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < nt; ++k)
        for (int m = 0; m < grid.tau_points; ++m)
          rep.samples.push_back({Vec3(axis(i, 0), axis(j, 1), axis(k, 2)), m * dtau, 0});
  evaluate_all(rep.samples, [&](const WidthSample& s) { return family.coarse_area(s.t, s.tau); });

  // Rescore the best coarse cells with adaptive quadrature.
  std::vector<WidthSample> top = rep.samples;
  std::sort(top.begin(), top.end(), better);
  top.resize(std::min<std::size_t>(top.size(), spatial ? grid.rescore : 1));
  if (spatial) evaluate_all(top, [&](const WidthSample& s) { return family.area(s.t, s.tau, grid.quad); });
  WidthSample best = *std::min_element(top.begin(), top.end(), better);
  rep.history.push_back(best.area);

  std::vector<double> taus;
  if (grid.refine_factor > 0) {
    const int f = grid.refine_factor;
    std::vector<WidthSample> fine;
    const int ns = spatial ? f : 0;
    for (int i = -ns; i <= ns; ++i)
      for (int j = -ns; j <= ns; ++j)
        for (int k = -ns; k <= ns; ++k)
          for (int m = -f; m <= f; ++m) {
            const double tau = best.tau + m * dtau / f;
            if (tau < 0 || tau > 1) continue;
            const Vec3 t = best.t + Vec3(i * step[0], j * step[1], k * step[2]) / f;
            fine.push_back({t, tau, 0});
          }
    evaluate_all(fine, [&](const WidthSample& s) { return family.area(s.t, s.tau, grid.quad); });
    for (const WidthSample& s : fine) {
      if (better(s, best)) best = s;
      taus.push_back(s.tau);
    }
    rep.history.push_back(best.area);
  }
  rep.max_area = best.area;
  rep.argmax_t = best.t;
  rep.argmax_tau = best.tau;
  if (family.analytic_area(0.5)) {
    for (const WidthSample& s : rep.samples) taus.push_back(s.tau);
    double m = 0;
    for (double tau : taus) m = std::max(m, *family.analytic_area(tau));
    rep.analytic_max = m;
  }
  return rep;
}

IsoperimetricBound width_lower_bound_isoperimetric(const SweepoutFamily& family, const IsoperimetricPath& path) {
  if (!(path.tau_lo >= 0 && path.tau_lo < path.tau_hi && path.tau_hi <= 1) || path.samples <= 0)
    fail(ErrorCode::Parameter, "sweepout", "invalid isoperimetric path");
  auto vol = [&](double tau) { return family.enclosed_volume(path.t, tau, path.samples, path.seed); };
  double a = path.tau_lo, b = path.tau_hi;
  const double va = vol(a), vb = vol(b);
  if (!(va < 0.5 && vb > 0.5)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "enclosed volume %.4g .. %.4g along the path does not cross 1/2", va, vb);
    fail(ErrorCode::NotSweepout, "sweepout", buf);
  }
  while (b - a > path.tau_tol) {
    const double m = 0.5 * (a + b);
    (vol(m) < 0.5 ? a : b) = m;
  }
  IsoperimetricBound out;
  out.floor = isoperimetric_profile(0.5);
  out.tau_half = 0.5 * (a + b);
  out.volume = vol(out.tau_half);
  out.slice_area = family.area(path.t, out.tau_half);
  return out;
}

GaussDegree gauss_degree(const TriMesh& mesh) {
  const TopologyReport topo = topology_report(mesh);
  if (mesh.num_faces() == 0 || !topo.watertight())
    fail(ErrorCode::Precondition, "sweepout", "Gauss degree needs a closed, consistently oriented mesh");
  const DifferentialData d = differential_data(mesh);
  NeumaierSum s;
  for (const Face& f : mesh.faces()) {
    const Vec3 &a = d.normal[f[0]], &b = d.normal[f[1]], &c = d.normal[f[2]];
    // Signed solid angle of the spherical triangle (a, b, c).
    s.add(2 * std::atan2(a.dot(b.cross(c)), 1 + a.dot(b) + b.dot(c) + c.dot(a)));
  }
  GaussDegree g;
  g.raw = s.value() / (4 * M_PI);
  g.degree = static_cast<int>(std::lround(g.raw));
  g.residual = std::abs(g.raw - g.degree);
  if (!(g.residual < 0.1)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "normal image covers %.4g spheres; refine the mesh", g.raw);
    fail(ErrorCode::Resolution, "sweepout", buf);
  }
  return g;
}

MinmaxLocation minmax_locate(const SweepoutFamily& family, const WidthReport& report, const ShrinkerLibrary& lib) {
  MinmaxLocation loc;
  loc.t = report.argmax_t;
  loc.tau = report.argmax_tau;
  loc.area = report.max_area;
  loc.slice = family.slice(loc.t, loc.tau);
  TriMesh probe;
  switch (loc.slice.kind) {
    case Slice::Kind::Mesh:
      probe = loc.slice.mesh;
      break;
    case Slice::Kind::Plane: {
      PrimitiveParams p;
      p.radius = 10;
      p.axis = loc.slice.normal;
      p.offset = loc.slice.offset;
      probe = generate_primitive(PrimitiveKind::PlaneDisk, p, 3);
      break;
    }
    case Slice::Kind::Empty:
      loc.gap.gamma = INFINITY;
      loc.plane_distance = INFINITY;
      return loc;
  }
  loc.gap = stationarity_gap(probe, lib);
  loc.plane_distance = INFINITY;
  for (std::size_t i = 0; i < lib.members.size(); ++i)
    if (lib.members[i].kind == LibraryMember::Kind::Plane)
      loc.plane_distance = std::min(loc.plane_distance, loc.gap.distances[i].total());
  return loc;
}

}  // namespace shrinker
