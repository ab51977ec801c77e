#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "shrinker/geometry.hpp"
#include "shrinker/mesh.hpp"
#include "shrinker/parallel.hpp"

namespace shrinker {

struct QuadratureSpec {
  int base_order = 7;               // points per triangle: 1, 3 or 7
  double adaptive_threshold = 0.5;  // relative weight variation that triggers a split
  int max_subdiv = 24;
  void validate() const;
};

// Symmetric rule on the reference triangle; weights sum to 1.
struct TriangleRule {
  std::vector<Vec3> bary;
  std::vector<double> weight;
};
const TriangleRule& triangle_rule(int order);
// Next lower rule used for error estimates (7 -> 3 -> 1 -> 1).
int lower_order(int order);

// Compensated (Neumaier) sum.
struct NeumaierSum {
  double sum = 0, comp = 0;
  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// rho(x) = norm * exp(-|x - x0|^2 / (4 t0)).
struct GaussWeight {
  Vec3 x0 = Vec3::Zero();
  double t0 = 1.0;
  double norm = 1.0;
  double operator()(const Vec3& x) const { return norm * std::exp(-(x - x0).squaredNorm() / (4 * t0)); }
  static GaussWeight density(const Vec3& x0, double t0);  // norm = 1/(4 pi t0)
};

enum class BallRegion { All, Inside, Outside };

// Restricts integration to one side of the sphere |x - center| = radius.
// Straddling triangles are split `depth` times, then an indicator is applied
// at the quadrature points.
struct BallClip {
  BallRegion region = BallRegion::All;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  int depth = 10;
  // Spheres about `center` across which the integrand is only piecewise
  // smooth; straddling triangles are split up to break_depth times.
  std::vector<double> breaks;
  int break_depth = 6;
};

namespace detail {

struct SubTri {
  Vec3 p[3];
  Vec3 b[3];  // barycentric coordinates of the corners in the parent face
};

template <int N, class Integrand>
struct FaceIntegrator {
  const GaussWeight& w;
  const QuadratureSpec& q;
  const BallClip& clip;
  const TriangleRule& rule;
  double skip_bound;
  Integrand& f;
  std::array<NeumaierSum, N>& acc;
  std::size_t face;

  bool crosses_break(const SubTri& t) const {
    if (clip.breaks.empty()) return false;
    double far = 0;
    for (int k = 0; k < 3; ++k) far = std::max(far, (t.p[k] - clip.center).norm());
    const double near = (closest_point_on_triangle(clip.center, t.p[0], t.p[1], t.p[2]) - clip.center).norm();
    for (double r : clip.breaks)
      if (near < r && r < far) return true;
    return false;
  }

  void run(const SubTri& t, int depth) {
    const Vec3 cp = closest_point_on_triangle(w.x0, t.p[0], t.p[1], t.p[2]);
    const double wmax = w(cp);
    const double area = 0.5 * (t.p[1] - t.p[0]).cross(t.p[2] - t.p[0]).norm();
    if (!(wmax * area > skip_bound)) return;
    bool straddle = false;
    if (clip.region != BallRegion::All) {
      double far = 0;
      for (int k = 0; k < 3; ++k) far = std::max(far, (t.p[k] - clip.center).norm());
      double near = (closest_point_on_triangle(clip.center, t.p[0], t.p[1], t.p[2]) - clip.center).norm();
      bool inside = far <= clip.radius, outside = near >= clip.radius;
      if (clip.region == BallRegion::Inside && outside) return;
      if (clip.region == BallRegion::Outside && inside) return;
      straddle = !inside && !outside;
    }
    double wmin = std::min({w(t.p[0]), w(t.p[1]), w(t.p[2])});
    bool split = (depth < q.max_subdiv && wmax - wmin > q.adaptive_threshold * wmax) ||
                 (straddle && depth < clip.depth) || (depth < clip.break_depth && crosses_break(t));
    if (split) {
      Vec3 pm[3] = {0.5 * (t.p[0] + t.p[1]), 0.5 * (t.p[1] + t.p[2]), 0.5 * (t.p[2] + t.p[0])};
      Vec3 bm[3] = {0.5 * (t.b[0] + t.b[1]), 0.5 * (t.b[1] + t.b[2]), 0.5 * (t.b[2] + t.b[0])};
      run({{t.p[0], pm[0], pm[2]}, {t.b[0], bm[0], bm[2]}}, depth + 1);
      run({{pm[0], t.p[1], pm[1]}, {bm[0], t.b[1], bm[1]}}, depth + 1);
      run({{pm[2], pm[1], t.p[2]}, {bm[2], bm[1], t.b[2]}}, depth + 1);
      run({{pm[0], pm[1], pm[2]}, {bm[0], bm[1], bm[2]}}, depth + 1);
      return;
    }
    for (std::size_t k = 0; k < rule.weight.size(); ++k) {
      const Vec3& l = rule.bary[k];
      const Vec3 x = l[0] * t.p[0] + l[1] * t.p[1] + l[2] * t.p[2];
      if (straddle) {
        bool in = (x - clip.center).norm() < clip.radius;
        if (in != (clip.region == BallRegion::Inside)) continue;
      }
      const Vec3 b = l[0] * t.b[0] + l[1] * t.b[1] + l[2] * t.b[2];
      f(face, b, x, w(x) * area * rule.weight[k], acc);
    }
  }
};

}  // namespace detail

// Integrates sum over quadrature points of f(face, bary, x, rho(x) dA, acc)
// over the mesh, where f adds its N components into acc. Faces whose weight
// bound is below 1e-17 of the total bound are skipped. Per-block partial
// sums are reduced in block order, so the result is independent of the
// thread count.
template <int N, class Integrand>
std::array<double, N> integrate_mesh(const TriMesh& mesh, const GaussWeight& w, const QuadratureSpec& q,
                                     Integrand f, const BallClip& clip = {}, int order = -1) {
  const TriangleRule& rule = triangle_rule(order < 0 ? q.base_order : order);
  const std::size_t nf = mesh.num_faces();
  std::vector<double> bound(nf);
  NeumaierSum total;
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const Face& t = mesh.face(fi);
    const Vec3 cp = closest_point_on_triangle(w.x0, mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
    bound[fi] = w(cp) * mesh.face_area(fi);
    total.add(bound[fi]);
  }
  const double skip = 1e-17 * total.value();
  constexpr std::size_t kBlock = 256;
  const std::size_t nblocks = (nf + kBlock - 1) / kBlock;
  std::vector<std::array<NeumaierSum, N>> partial(nblocks);
  parallel_blocks(nblocks, [&](std::size_t blk) {
    Integrand fl = f;
    std::array<NeumaierSum, N>& acc = partial[blk];
    detail::FaceIntegrator<N, Integrand> fi{w, q, clip, rule, skip, fl, acc, 0};
    for (std::size_t fc = blk * kBlock; fc < std::min(nf, (blk + 1) * kBlock); ++fc) {
      if (!(bound[fc] > skip)) continue;
      const Face& t = mesh.face(fc);
      fi.face = fc;
      fi.run({{mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])},
              {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}},
             0);
    }
  });
  std::array<double, N> out{};
  for (int c = 0; c < N; ++c) {
    NeumaierSum s;
    for (auto& p : partial) s.add(p[c].value());
    out[c] = s.value();
  }
  return out;
}

}  // namespace shrinker
