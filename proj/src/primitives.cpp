#include "shrinker/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

#include <Eigen/Geometry>

#include "shrinker/error.hpp"

namespace shrinker {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v))
    fail(ErrorCode::Parameter, "mesh-core", std::string(name) + " must be positive");
}

// Any orthonormal pair completing a unit vector.
void frame_from(const Vec3& a, Vec3& e1, Vec3& e2) {
  Vec3 h = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (h - h.dot(a) * a).normalized();
  e2 = a.cross(e1);
}

struct Ring {
  std::vector<int> ids;
  std::vector<double> angles;  // increasing in [a0, a0 + 2pi)
};

// Triangulates the band between two closed rings by merging angles. The
// band is oriented so that (lower -> upper) runs along the ring normal.
void stitch(const Ring& lo, const Ring& hi, std::vector<Face>& faces, bool flip) {
  const std::size_t n = lo.ids.size(), m = hi.ids.size();
  std::size_t i = 0, j = 0;
  auto ang_lo = [&](std::size_t k) { return lo.angles[k % n] + 2 * kPi * (k / n); };
  auto ang_hi = [&](std::size_t k) { return hi.angles[k % m] + 2 * kPi * (k / m); };
  auto push = [&](int a, int b, int c) {
    if (flip)
      faces.push_back({a, c, b});
    else
      faces.push_back({a, b, c});
  };
  while (i < n || j < m) {
    bool adv_lo;
    if (i >= n)
      adv_lo = false;
    else if (j >= m)
      adv_lo = true;
    else
      adv_lo = ang_lo(i + 1) < ang_hi(j + 1);
    if (adv_lo) {
      push(lo.ids[i % n], lo.ids[(i + 1) % n], hi.ids[j % m]);
      ++i;
    } else {
      push(lo.ids[i % n], hi.ids[(j + 1) % m], hi.ids[j % m]);
      ++j;
    }
  }
}

TriMesh make_sphere(const PrimitiveParams& p, int ref) {
  require_positive(p.radius, "radius");
  TriMesh u = unit_icosphere(ref);
  std::vector<Vec3> v;
  for (const Vec3& x : u.vertices()) v.push_back(p.center + p.radius * x);
  return TriMesh(std::move(v), u.faces(), "sphere");
}

TriMesh make_ellipsoid(const PrimitiveParams& p, int ref) {
  for (int k = 0; k < 3; ++k) require_positive(p.semi_axes[k], "semi-axis");
  TriMesh u = unit_icosphere(ref);
  std::vector<Vec3> v;
  for (const Vec3& x : u.vertices()) v.push_back(p.center + x.cwiseProduct(p.semi_axes));
  return TriMesh(std::move(v), u.faces(), "ellipsoid");
}

TriMesh make_perturbed_sphere(const PrimitiveParams& p, int ref) {
  require_positive(p.radius, "radius");
  if (p.harmonic_degree < 1) fail(ErrorCode::Parameter, "mesh-core", "harmonic degree must be >= 1");
  if (!(std::abs(p.epsilon) < 0.5)) fail(ErrorCode::Parameter, "mesh-core", "|epsilon| must be < 0.5");
  const Vec3 axis = p.axis.normalized();
  TriMesh u = unit_icosphere(ref);
  std::vector<Vec3> v;
  for (const Vec3& x : u.vertices()) {
    double r = p.radius * (1.0 + p.epsilon * std::legendre(p.harmonic_degree, x.dot(axis)));
    v.push_back(p.center + r * x);
  }
  return TriMesh(std::move(v), u.faces(), "perturbed_sphere");
}

TriMesh make_torus(const PrimitiveParams& p, int ref) {
  require_positive(p.major_radius, "major radius");
  require_positive(p.minor_radius, "minor radius");
  if (!(p.minor_radius < p.major_radius))
    fail(ErrorCode::Parameter, "mesh-core", "torus needs minor radius < major radius");
  const int nu = 12 << ref, nw = 6 << ref;
  std::vector<Vec3> v;
  v.reserve(nu * nw);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nw; ++j) {
      // Alternate rows are shifted by half a step along the tube.
      double u = 2 * kPi * i / nu;
      double w = 2 * kPi * (j + 0.5 * (i % 2)) / nw;
      double rr = p.major_radius + p.minor_radius * std::cos(w);
      v.push_back(p.center + Vec3(rr * std::cos(u), rr * std::sin(u), p.minor_radius * std::sin(w)));
    }
  }
  std::vector<Face> f;
  auto id = [&](int i, int j) { return ((i % nu + nu) % nu) * nw + ((j % nw + nw) % nw); };
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nw; ++j) {
      if (i % 2 == 0) {
        f.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        f.push_back({id(i, j + 1), id(i + 1, j), id(i + 1, j + 1)});
      } else {
        f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    }
  }
  if (nu % 2 != 0) fail(ErrorCode::Parameter, "mesh-core", "internal: odd torus ring count");
  return TriMesh(std::move(v), std::move(f), "torus");
}

TriMesh make_cylinder(const PrimitiveParams& p, int ref) {
  require_positive(p.radius, "radius");
  require_positive(p.half_length, "half-length");
  const Vec3 a = p.axis.normalized();
  Vec3 e1, e2;
  frame_from(a, e1, e2);
  const int n = 6 << ref;
  const double h_theta = 2 * kPi * p.radius / n;
  const double h_z = h_theta * std::sqrt(3.0) / 2.0;
  const int nrings = std::max(2, static_cast<int>(std::lround(2 * p.half_length / h_z)) + 1);
  std::vector<Vec3> v;
  std::vector<Ring> rings(nrings);
  for (int k = 0; k < nrings; ++k) {
    double z = -p.half_length + 2 * p.half_length * k / (nrings - 1);
    double shift = (k % 2) ? kPi / n : 0.0;
    for (int i = 0; i < n; ++i) {
      double th = shift + 2 * kPi * i / n;
      rings[k].ids.push_back(static_cast<int>(v.size()));
      rings[k].angles.push_back(th);
      v.push_back(p.center + z * a + p.radius * (std::cos(th) * e1 + std::sin(th) * e2));
    }
  }
  std::vector<Face> f;
  // Outward orientation: e1 x e2 = a, rings ordered along a.
  for (int k = 0; k + 1 < nrings; ++k) stitch(rings[k], rings[k + 1], f, false);
  TriMesh m(std::move(v), std::move(f), "cylinder");
  if (p.with_tail) m = m.with_tail(CylinderTail{p.center, a, p.radius, p.half_length});
  return m;
}

TriMesh make_plane_disk(const PrimitiveParams& p, int ref) {
  require_positive(p.radius, "radius");
  const Vec3 nrm = p.axis.normalized();
  Vec3 e1, e2;
  frame_from(nrm, e1, e2);
  const Vec3 c0 = p.offset * nrm;
  const int K = 3 << ref;  // rings
  const double h = p.radius / K;
  std::vector<Vec3> v{c0};
  std::vector<Face> f;
  Ring prev;
  prev.ids = {0};
  prev.angles = {0.0};
  for (int k = 1; k <= K; ++k) {
    Ring cur;
    int cnt = 6 * k;
    double shift = (k % 2) ? kPi / cnt : 0.0;
    for (int i = 0; i < cnt; ++i) {
      double th = shift + 2 * kPi * i / cnt;
      cur.ids.push_back(static_cast<int>(v.size()));
      cur.angles.push_back(th);
      v.push_back(c0 + k * h * (std::cos(th) * e1 + std::sin(th) * e2));
    }
    if (k == 1) {
      for (int i = 0; i < cnt; ++i) f.push_back({0, cur.ids[i], cur.ids[(i + 1) % cnt]});
    } else {
      stitch(prev, cur, f, true);
    }
    prev = cur;
  }
  TriMesh m(std::move(v), std::move(f), "plane_disk");
  if (p.with_tail) m = m.with_tail(PlaneTail{c0, nrm, p.radius});
  return m;
}

// Genus-2 polycube: a 5x3x1 slab of cubes with two through-holes, each
// boundary square split into a (2^ref)x(2^ref) grid, then smoothed.
TriMesh make_double_torus(const PrimitiveParams& p, int ref) {
  require_positive(p.scale, "scale");
  const int NX = 5, NY = 3;
  auto filled = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k != 0 || i >= NX || j >= NY) return false;
    return !((i == 1 && j == 1) || (i == 3 && j == 1));
  };
  const int sub = 1 << ref;
  std::map<std::array<int, 3>, int> index;  // lattice at resolution 1/sub
  std::vector<Vec3> v;
  auto vid = [&](int x, int y, int z) {
    std::array<int, 3> key{x, y, z};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(v.size());
    index.emplace(key, id);
    v.push_back(Vec3(x, y, z) / sub);
    return id;
  };
  std::vector<Face> f;
  // Emits the face of cell (i,j,k) on side `dir` with outward normal +/-axis.
  for (int i = 0; i < NX; ++i)
    for (int j = 0; j < NY; ++j) {
      const int k = 0;
      if (!filled(i, j, k)) continue;
      for (int axis = 0; axis < 3; ++axis)
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          std::array<int, 3> nb{i, j, k};
          nb[axis] += sgn;
          if (filled(nb[0], nb[1], nb[2])) continue;
          int ua = (axis + 1) % 3, wa = (axis + 2) % 3;
          for (int a = 0; a < sub; ++a)
            for (int b = 0; b < sub; ++b) {
              auto corner = [&](int da, int db) {
                std::array<int, 3> c{i * sub, j * sub, k * sub};
                c[axis] += (sgn > 0 ? sub : 0);
                c[ua] += a + da;
                c[wa] += b + db;
                return vid(c[0], c[1], c[2]);
              };
              int c00 = corner(0, 0), c10 = corner(1, 0), c11 = corner(1, 1), c01 = corner(0, 1);
              // (ua, wa, axis) is right-handed, so ccw in (ua,wa) faces +axis.
              if (sgn > 0) {
                f.push_back({c00, c10, c11});
                f.push_back({c00, c11, c01});
              } else {
                f.push_back({c00, c11, c10});
                f.push_back({c00, c01, c11});
              }
            }
        }
    }
  // Taubin smoothing rounds the cube edges without shrinking the solid much.
  std::vector<std::set<int>> nbrs(v.size());
  for (const Face& t : f)
    for (int e = 0; e < 3; ++e) {
      nbrs[t[e]].insert(t[(e + 1) % 3]);
      nbrs[t[(e + 1) % 3]].insert(t[e]);
    }
  const int iters = 10 * sub;
  for (int it = 0; it < iters; ++it) {
    for (double lam : {0.5, -0.53}) {
      std::vector<Vec3> nv = v;
      for (std::size_t q = 0; q < v.size(); ++q) {
        Vec3 c = Vec3::Zero();
        for (int r : nbrs[q]) c += v[r];
        c /= static_cast<double>(nbrs[q].size());
        nv[q] = v[q] + lam * (c - v[q]);
      }
      v.swap(nv);
    }
  }
  const Vec3 mid(NX / 2.0, NY / 2.0, 0.5);
  for (Vec3& x : v) x = p.center + p.scale * (x - mid);
  return TriMesh(std::move(v), std::move(f), "double_torus");
}

}  // namespace

PrimitiveKind parse_primitive_kind(const std::string& name) {
  static const std::map<std::string, PrimitiveKind> table{
      {"sphere", PrimitiveKind::Sphere},       {"cylinder", PrimitiveKind::Cylinder},
      {"torus", PrimitiveKind::Torus},         {"ellipsoid", PrimitiveKind::Ellipsoid},
      {"perturbed_sphere", PrimitiveKind::PerturbedSphere},
      {"plane_disk", PrimitiveKind::PlaneDisk}, {"plane", PrimitiveKind::PlaneDisk},
      {"double_torus", PrimitiveKind::DoubleTorus}};
  auto it = table.find(name);
  if (it == table.end()) fail(ErrorCode::Parameter, "mesh-core", "unknown primitive kind '" + name + "'");
  return it->second;
}

std::string primitive_kind_name(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Sphere: return "sphere";
    case PrimitiveKind::Cylinder: return "cylinder";
    case PrimitiveKind::Torus: return "torus";
    case PrimitiveKind::Ellipsoid: return "ellipsoid";
    case PrimitiveKind::PerturbedSphere: return "perturbed_sphere";
    case PrimitiveKind::PlaneDisk: return "plane_disk";
    case PrimitiveKind::DoubleTorus: return "double_torus";
  }
  return "unknown";
}

TriMesh unit_icosphere(int refinement) {
  if (refinement < 0) fail(ErrorCode::Parameter, "mesh-core", "refinement must be >= 0");
  if (refinement > 8) fail(ErrorCode::Parameter, "mesh-core", "refinement above 8 is not supported");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& x : v) x.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int r = 0; r < refinement; ++r) {
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      int id = static_cast<int>(v.size());
      v.push_back((v[a] + v[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> nf;
    nf.reserve(f.size() * 4);
    for (const Face& q : f) {
      int a = midpoint(q[0], q[1]), b = midpoint(q[1], q[2]), c = midpoint(q[2], q[0]);
      nf.push_back({q[0], a, c});
      nf.push_back({q[1], b, a});
      nf.push_back({q[2], c, b});
      nf.push_back({a, b, c});
    }
    f.swap(nf);
  }
  return TriMesh(std::move(v), std::move(f), "icosphere");
}

TriMesh generate_primitive(PrimitiveKind kind, const PrimitiveParams& params, int refinement) {
  if (refinement < 0) fail(ErrorCode::Parameter, "mesh-core", "refinement must be >= 0");
  switch (kind) {
    case PrimitiveKind::Sphere: return make_sphere(params, refinement);
    case PrimitiveKind::Ellipsoid: return make_ellipsoid(params, refinement);
    case PrimitiveKind::PerturbedSphere: return make_perturbed_sphere(params, refinement);
    case PrimitiveKind::Torus: return make_torus(params, refinement);
    case PrimitiveKind::Cylinder: return make_cylinder(params, refinement);
    case PrimitiveKind::PlaneDisk: return make_plane_disk(params, refinement);
    case PrimitiveKind::DoubleTorus: return make_double_torus(params, refinement);
  }
  fail(ErrorCode::Parameter, "mesh-core", "unknown primitive kind");
}

}  // namespace shrinker
