#include "shrinker/gaussian_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include "shrinker/error.hpp"
#include "shrinker/topology.hpp"

namespace shrinker {

namespace {
constexpr double kPi = std::numbers::pi;
const char* kModule = "gaussian-measure";
}  // namespace

void QuadratureSpec::validate() const {
  if (base_order != 1 && base_order != 3 && base_order != 7)
    fail(ErrorCode::Parameter, kModule, "base_order must be 1, 3 or 7");
  if (!(adaptive_threshold > 0)) fail(ErrorCode::Parameter, kModule, "adaptive_threshold must be positive");
  if (max_subdiv < 0) fail(ErrorCode::Parameter, kModule, "max_subdiv must be >= 0");
}

const TriangleRule& triangle_rule(int order) {
  static const TriangleRule r1{{Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)}, {1.0}};
  static const TriangleRule r3{{Vec3(2.0 / 3, 1.0 / 6, 1.0 / 6), Vec3(1.0 / 6, 2.0 / 3, 1.0 / 6),
                                Vec3(1.0 / 6, 1.0 / 6, 2.0 / 3)},
                               {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  static const TriangleRule r7 = [] {
    const double s = std::sqrt(15.0);
    const double a1 = (9 - 2 * s) / 21, b1 = (6 + s) / 21, w1 = (155 + s) / 1200;
    const double a2 = (9 + 2 * s) / 21, b2 = (6 - s) / 21, w2 = (155 - s) / 1200;
    TriangleRule r;
    r.bary = {Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3), Vec3(a1, b1, b1), Vec3(b1, a1, b1), Vec3(b1, b1, a1),
              Vec3(a2, b2, b2), Vec3(b2, a2, b2), Vec3(b2, b2, a2)};
    r.weight = {9.0 / 40, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  switch (order) {
    case 1: return r1;
    case 3: return r3;
    case 7: return r7;
  }
  fail(ErrorCode::Parameter, kModule, "unsupported rule order " + std::to_string(order));
}

int lower_order(int order) { return order == 7 ? 3 : (order == 3 ? 1 : 3); }

GaussWeight GaussWeight::density(const Vec3& x0, double t0) {
  if (!(t0 > 0)) fail(ErrorCode::Parameter, kModule, "t0 must be positive");
  return GaussWeight{x0, t0, 1.0 / (4 * kPi * t0)};
}

namespace {

struct ValueOnly {
  void operator()(std::size_t, const Vec3&, const Vec3&, double w, std::array<NeumaierSum, 1>& acc) const {
    acc[0].add(w);
  }
};

double mesh_density(const TriMesh& mesh, const GaussWeight& w, const QuadratureSpec& q, int order = -1,
                    const BallClip& clip = {}) {
  return integrate_mesh<1>(mesh, w, q, ValueOnly{}, clip, order)[0];
}

}  // namespace

AreaResult gaussian_area(const TriMesh& mesh, const QuadratureSpec& q, const std::optional<AnalyticTail>& tail) {
  q.validate();
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  AreaResult r;
  const double main = mesh_density(mesh, w, q);
  const double other = mesh_density(mesh, w, q, lower_order(q.base_order));
  r.tail_correction = tail ? tail_density(*tail, Vec3::Zero(), 1.0) : 0.0;
  r.value = main + r.tail_correction;
  r.error_estimate = std::abs(main - other);
  return r;
}

AreaResult gaussian_area(const TriMesh& mesh, const QuadratureSpec& q) { return gaussian_area(mesh, q, mesh.tail()); }

double f_density(const TriMesh& mesh, const DensityParams& p, const QuadratureSpec& q) {
  q.validate();
  const GaussWeight w = GaussWeight::density(p.x0, p.t0);
  double v = mesh_density(mesh, w, q);
  if (mesh.tail()) v += tail_density(*mesh.tail(), p.x0, p.t0);
  return v;
}

DensityGradient f_density_gradient(const TriMesh& mesh, const DensityParams& p, const QuadratureSpec& q) {
  q.validate();
  const GaussWeight w = GaussWeight::density(p.x0, p.t0);
  const double t0 = p.t0;
  const Vec3 x0 = p.x0;
  auto fn = [x0, t0](std::size_t, const Vec3&, const Vec3& x, double wt, std::array<NeumaierSum, 5>& acc) {
    const Vec3 r = x - x0;
    acc[0].add(wt);
    acc[1].add(wt * r.x() / (2 * t0));
    acc[2].add(wt * r.y() / (2 * t0));
    acc[3].add(wt * r.z() / (2 * t0));
    acc[4].add(wt * (r.squaredNorm() / (4 * t0) - 1.0));
  };
  auto a = integrate_mesh<5>(mesh, w, q, fn);
  DensityGradient g{a[0], Vec3(a[1], a[2], a[3]), a[4]};
  if (mesh.tail()) {
    const AnalyticTail& tl = *mesh.tail();
    g.value += tail_density(tl, x0, t0);
    const double hx = 1e-5 * std::max(1.0, std::sqrt(t0));
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = hx;
      g.d_x0[k] += (tail_density(tl, x0 + e, t0) - tail_density(tl, x0 - e, t0)) / (2 * hx);
    }
    const double hu = 1e-5;
    g.d_log_t0 += (tail_density(tl, x0, t0 * std::exp(hu)) - tail_density(tl, x0, t0 * std::exp(-hu))) / (2 * hu);
  }
  return g;
}

TriMesh translate_dilate(const TriMesh& mesh, const Vec3& t, double s) {
  if (!(s > 0) || !std::isfinite(s)) fail(ErrorCode::Parameter, kModule, "dilation factor must be positive");
  std::vector<Vec3> v;
  v.reserve(mesh.num_vertices());
  for (const Vec3& x : mesh.vertices()) v.push_back(s * (x - t));
  TriMesh out = mesh.with_vertices(std::move(v));
  if (mesh.tail()) out = out.with_tail(transform_tail(*mesh.tail(), t, s));
  return out;
}

// ---------------------------------------------------------------------------
// Enclosed volume

namespace {

class RayGrid {
 public:
  explicit RayGrid(const TriMesh& m) : mesh_(m) {
    Vec3 lo, hi;
    m.bounding_box(lo, hi);
    x0_ = lo.x();
    y0_ = lo.y();
    n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.num_faces()))));
    dx_ = std::max(hi.x() - lo.x(), 1e-300) / n_;
    dy_ = std::max(hi.y() - lo.y(), 1e-300) / n_;
    cells_.resize(static_cast<std::size_t>(n_) * n_);
    zmax_.resize(m.num_faces());
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
      const Face& t = m.face(f);
      double ax = 1e300, bx = -1e300, ay = 1e300, by = -1e300, zm = -1e300;
      for (int k = 0; k < 3; ++k) {
        const Vec3& p = m.vertex(t[k]);
        ax = std::min(ax, p.x());
        bx = std::max(bx, p.x());
        ay = std::min(ay, p.y());
        by = std::max(by, p.y());
        zm = std::max(zm, p.z());
      }
      zmax_[f] = zm;
      int i0 = cx(ax), i1 = cx(bx), j0 = cy(ay), j1 = cy(by);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) cells_[static_cast<std::size_t>(i) * n_ + j].push_back(static_cast<int>(f));
    }
    xmax_ = hi.x();
    ymax_ = hi.y();
  }

  bool inside(const Vec3& p) const {
    if (p.x() < x0_ || p.y() < y0_ || p.x() > xmax_ || p.y() > ymax_) return false;
    const auto& cell = cells_[static_cast<std::size_t>(cx(p.x())) * n_ + cy(p.y())];
    int crossings = 0;
    for (int f : cell) {
      if (zmax_[f] < p.z()) continue;
      const Face& t = mesh_.face(f);
      const Vec3& a = mesh_.vertex(t[0]);
      const Vec3& b = mesh_.vertex(t[1]);
      const Vec3& c = mesh_.vertex(t[2]);
      double d = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
      if (d == 0) continue;
      double l1 = ((p.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (p.y() - a.y())) / d;
      double l2 = ((b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y())) / d;
      double l0 = 1 - l1 - l2;
      if (l0 < 0 || l1 < 0 || l2 < 0) continue;
      double z = l0 * a.z() + l1 * b.z() + l2 * c.z();
      if (z > p.z()) ++crossings;
    }
    return crossings % 2 == 1;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>((x - x0_) / dx_), 0, n_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - y0_) / dy_), 0, n_ - 1); }
  const TriMesh& mesh_;
  double x0_, y0_, dx_, dy_, xmax_ = 0, ymax_ = 0;
  int n_;
  std::vector<std::vector<int>> cells_;
  std::vector<double> zmax_;
};

}  // namespace

EnclosedVolume gaussian_enclosed_volume(const TriMesh& mesh, long long samples, std::uint64_t seed) {
  if (samples <= 0) fail(ErrorCode::Parameter, kModule, "sample count must be positive");
  if (!topology_report(mesh).watertight())
    fail(ErrorCode::Topology, kModule, "enclosed volume needs a closed, consistently oriented mesh");
  RayGrid grid(mesh);
  constexpr long long kBlock = 1 << 15;
  const std::size_t nblocks = static_cast<std::size_t>((samples + kBlock - 1) / kBlock);
  std::vector<long long> hits(nblocks, 0);
  parallel_blocks(nblocks, [&](std::size_t b) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(b), 0x5eedu};
    std::mt19937_64 rng(sq);
    std::normal_distribution<double> nd(0.0, std::sqrt(2.0));
    long long lo = static_cast<long long>(b) * kBlock, hi = std::min(samples, lo + kBlock);
    long long h = 0;
    for (long long i = lo; i < hi; ++i) {
      Vec3 p(nd(rng), nd(rng), nd(rng));
      if (grid.inside(p)) ++h;
    }
    hits[b] = h;
  });
  long long total = 0;
  for (long long h : hits) total += h;
  EnclosedVolume r;
  r.samples = samples;
  r.seed = seed;
  r.value = static_cast<double>(total) / samples;
  r.standard_error = std::sqrt(std::max(r.value * (1 - r.value), 0.0) / samples);
  return r;
}

double halfspace_volume(double d) { return 0.5 * std::erfc(d / 2); }

double isoperimetric_profile(double v) {
  if (!(v >= 0 && v <= 1)) fail(ErrorCode::Parameter, kModule, "volume must lie in [0, 1]");
  if (v == 0 || v == 1) return 0.0;
  // halfspace_volume is decreasing in d.
  double lo = -60, hi = 60;
  while (hi - lo > 1e-13) {
    double mid = 0.5 * (lo + hi);
    if (halfspace_volume(mid) > v)
      lo = mid;
    else
      hi = mid;
  }
  double d = 0.5 * (lo + hi);
  if (v == 0.5) d = 0.0;
  return std::exp(-d * d / 4);
}

// ---------------------------------------------------------------------------
// Ball-restricted quantities

namespace {

// Signed area of disk(0, r) intersected with triangle (0, a, b) in 2D.
double disk_wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double r) {
  const Eigen::Vector2d d = b - a;
  double A = d.squaredNorm(), B = 2 * a.dot(d), C = a.squaredNorm() - r * r;
  std::vector<double> ts{0.0};
  double disc = B * B - 4 * A * C;
  if (A > 0 && disc > 0) {
    double sq = std::sqrt(disc);
    for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
      if (t > 0 && t < 1) ts.push_back(t);
  }
  ts.push_back(1.0);
  double s = 0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    Eigen::Vector2d p = a + ts[k] * d, q = a + ts[k + 1] * d;
    Eigen::Vector2d m = 0.5 * (p + q);
    double cr = p.x() * q.y() - p.y() * q.x();
    if (m.squaredNorm() <= r * r)
      s += 0.5 * cr;
    else
      s += 0.5 * r * r * std::atan2(cr, p.dot(q));
  }
  return s;
}

}  // namespace

double euclidean_area_in_ball(const TriMesh& mesh, const Vec3& center, double radius) {
  NeumaierSum total;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.face(f);
    const Vec3 p0 = mesh.vertex(t[0]) - center, p1 = mesh.vertex(t[1]) - center, p2 = mesh.vertex(t[2]) - center;
    const Vec3 n = mesh.face_normal(f);
    const double h = p0.dot(n);
    if (std::abs(h) >= radius) continue;
    const double r2 = std::sqrt(radius * radius - h * h);
    Vec3 e1, e2;
    orthonormal_frame(n, e1, e2);
    const Vec3 c = h * n;
    auto proj = [&](const Vec3& p) { return Eigen::Vector2d((p - c).dot(e1), (p - c).dot(e2)); };
    Eigen::Vector2d a = proj(p0), b = proj(p1), d = proj(p2);
    double s = disk_wedge(a, b, r2) + disk_wedge(b, d, r2) + disk_wedge(d, a, r2);
    total.add(std::abs(s));
  }
  return total.value();
}

std::vector<VolumeGrowthRecord> volume_growth_check(const TriMesh& mesh, const std::vector<double>& radii,
                                                    const QuadratureSpec& q) {
  const double F = gaussian_area(mesh, q).value;
  const double C = std::exp(0.25) * 4 * kPi;
  std::vector<VolumeGrowthRecord> out;
  for (double r : radii) {
    if (!(r > 0)) fail(ErrorCode::Parameter, kModule, "radii must be positive");
    VolumeGrowthRecord rec;
    rec.radius = r;
    rec.euclidean_mass = euclidean_area_in_ball(mesh, Vec3::Zero(), r);
    rec.bound = C * F * r * r;
    rec.pass = rec.euclidean_mass <= rec.bound;
    out.push_back(rec);
  }
  return out;
}

double mass_near_infinity(const TriMesh& mesh, double R, const QuadratureSpec& q) {
  q.validate();
  if (R <= 0) return gaussian_area(mesh, q).value;
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  BallClip clip{BallRegion::Outside, Vec3::Zero(), R, 12, {}, 6};
  double v = mesh_density(mesh, w, q, -1, clip);
  if (mesh.tail()) v += tail_density(*mesh.tail(), Vec3::Zero(), 1.0, R);
  return v;
}

double mass_in_annulus(const TriMesh& mesh, double r0, double r1, const QuadratureSpec& q) {
  if (!(r1 > r0)) return 0.0;
  return std::max(0.0, mass_near_infinity(mesh, r0, q) - mass_near_infinity(mesh, r1, q));
}

PlaneFit nearest_plane(const TriMesh& mesh, const QuadratureSpec& q, std::optional<double> ball_radius) {
  q.validate();
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  BallClip clip;
  if (ball_radius) clip = BallClip{BallRegion::Inside, Vec3::Zero(), *ball_radius, 12, {}, 6};
  auto fn = [](std::size_t, const Vec3&, const Vec3& x, double wt, std::array<NeumaierSum, 10>& acc) {
    acc[0].add(wt);
    acc[1].add(wt * x.x());
    acc[2].add(wt * x.y());
    acc[3].add(wt * x.z());
    acc[4].add(wt * x.x() * x.x());
    acc[5].add(wt * x.y() * x.y());
    acc[6].add(wt * x.z() * x.z());
    acc[7].add(wt * x.x() * x.y());
    acc[8].add(wt * x.x() * x.z());
    acc[9].add(wt * x.y() * x.z());
  };
  auto a = integrate_mesh<10>(mesh, w, q, fn, clip);
  const double W = a[0];
  if (!(W > 0)) fail(ErrorCode::Undefined, kModule, "nearest plane of a mesh with zero Gaussian area");
  const Vec3 m(a[1] / W, a[2] / W, a[3] / W);
  Eigen::Matrix3d S;
  S << a[4], a[7], a[8], a[7], a[5], a[9], a[8], a[9], a[6];
  S /= W;
  const Eigen::Matrix3d C = S - m * m.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(C);
  PlaneFit fit;
  fit.normal = es.eigenvectors().col(0);
  fit.offset = fit.normal.dot(m);
  if (fit.offset < 0) {
    fit.normal = -fit.normal;
    fit.offset = -fit.offset;
  }
  fit.rms_deviation = std::sqrt(std::max(es.eigenvalues()(0), 0.0));
  const double d = fit.offset;
  double F_plane = std::exp(-d * d / 4);
  if (ball_radius) {
    fit.area = W;
    double R = *ball_radius;
    F_plane = R > d ? std::exp(-d * d / 4) * (1 - std::exp(-(R * R - d * d) / 4)) : 0.0;
  } else {
    fit.area = W + (mesh.tail() ? tail_density(*mesh.tail(), Vec3::Zero(), 1.0) : 0.0);
  }
  fit.area_deviation = std::abs(fit.area - F_plane);
  fit.distance_proxy = fit.rms_deviation + fit.area_deviation;
  return fit;
}

}  // namespace shrinker
