#include "shrinker/differential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "shrinker/geometry.hpp"

namespace shrinker {

namespace {
constexpr double kSliverAspect = 1e6;
constexpr double kCotCap = 1e6;
}

void face_angles(const TriMesh& mesh, std::size_t f, double angles[3]) {
  const Face& t = mesh.face(f);
  for (int k = 0; k < 3; ++k) {
    const Vec3& p = mesh.vertex(t[k]);
    angles[k] = angle_between(mesh.vertex(t[(k + 1) % 3]) - p, mesh.vertex(t[(k + 2) % 3]) - p);
  }
}

double face_aspect(const TriMesh& mesh, std::size_t f) {
  const Face& t = mesh.face(f);
  double l2 = 0;
  for (int k = 0; k < 3; ++k)
    l2 = std::max(l2, (mesh.vertex(t[k]) - mesh.vertex(t[(k + 1) % 3])).squaredNorm());
  double a = mesh.face_area(f);
  return a > 0 ? l2 / (2 * a) : std::numeric_limits<double>::infinity();
}

double min_face_angle(const TriMesh& mesh) {
  double m = std::numbers::pi;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    double a[3];
    face_angles(mesh, f, a);
    m = std::min({m, a[0], a[1], a[2]});
  }
  return m;
}

std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh) {
  std::vector<std::vector<int>> nb(mesh.num_vertices());
  for (const Face& t : mesh.faces())
    for (int k = 0; k < 3; ++k) {
      nb[t[k]].push_back(t[(k + 1) % 3]);
      nb[t[k]].push_back(t[(k + 2) % 3]);
    }
  for (auto& l : nb) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  return nb;
}

DifferentialData differential_data(const TriMesh& mesh) {
  const std::size_t nv = mesh.num_vertices();
  DifferentialData d;
  d.normal.assign(nv, Vec3::Zero());
  d.mean_curvature.assign(nv, 0.0);
  d.gauss_curvature.assign(nv, 0.0);
  d.second_fundamental_sq.assign(nv, 0.0);
  d.area.assign(nv, 0.0);
  d.reliable.assign(nv, true);

  std::vector<Vec3> lap(nv, Vec3::Zero());
  std::vector<double> angle_sum(nv, 0.0);
  std::size_t slivers = 0;

  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.face(f);
    double ang[3];
    face_angles(mesh, f, ang);
    const double area = mesh.face_area(f);
    const Vec3 fn = mesh.face_normal(f);
    const bool sliver = face_aspect(mesh, f) > kSliverAspect;
    if (sliver) {
      ++slivers;
      for (int k = 0; k < 3; ++k) d.reliable[t[k]] = false;
    }
    for (int k = 0; k < 3; ++k) {
      d.normal[t[k]] += ang[k] * fn;
      angle_sum[t[k]] += ang[k];
    }
    // Mixed Voronoi areas.
    const bool obtuse = ang[0] > std::numbers::pi / 2 || ang[1] > std::numbers::pi / 2 ||
                        ang[2] > std::numbers::pi / 2;
    for (int k = 0; k < 3; ++k) {
      int i = t[k], j = t[(k + 1) % 3], l = t[(k + 2) % 3];
      if (!obtuse) {
        double cot_l = 1.0 / std::tan(ang[(k + 2) % 3]);
        double cot_j = 1.0 / std::tan(ang[(k + 1) % 3]);
        d.area[i] += 0.125 * ((mesh.vertex(i) - mesh.vertex(j)).squaredNorm() * cot_l +
                              (mesh.vertex(i) - mesh.vertex(l)).squaredNorm() * cot_j);
      } else {
        d.area[i] += ang[k] > std::numbers::pi / 2 ? area / 2 : area / 4;
      }
    }
    if (sliver) continue;
    for (int k = 0; k < 3; ++k) {
      int i = t[(k + 1) % 3], j = t[(k + 2) % 3];
      double w = 0.5 * std::clamp(1.0 / std::tan(ang[k]), -kCotCap, kCotCap);
      Vec3 e = mesh.vertex(j) - mesh.vertex(i);
      lap[i] += w * e;
      lap[j] -= w * e;
    }
  }
  if (slivers)
    d.warnings.push_back(std::to_string(slivers) + " sliver faces (aspect > 1e6); values interpolated");

  for (std::size_t i = 0; i < nv; ++i) {
    double len = d.normal[i].norm();
    if (len > 0) d.normal[i] /= len;
    if (mesh.is_boundary(i)) d.reliable[i] = false;
    double A = d.area[i];
    if (A <= 0) {
      d.reliable[i] = false;
      continue;
    }
    d.mean_curvature[i] = -lap[i].dot(d.normal[i]) / A;
    double deficit = (mesh.is_boundary(i) ? std::numbers::pi : 2 * std::numbers::pi) - angle_sum[i];
    d.gauss_curvature[i] = deficit / A;
    double h = d.mean_curvature[i];
    d.second_fundamental_sq[i] = std::max(h * h - 2 * d.gauss_curvature[i], 0.0);
  }

  // Unreliable vertices take the average of reliable neighbours.
  auto nb = vertex_neighbors(mesh);
  std::vector<double> H = d.mean_curvature, K = d.gauss_curvature, A2 = d.second_fundamental_sq;
  for (std::size_t i = 0; i < nv; ++i) {
    if (d.reliable[i]) continue;
    double sh = 0, sk = 0, sa = 0;
    int cnt = 0;
    for (int j : nb[i])
      if (d.reliable[j]) {
        sh += d.mean_curvature[j];
        sk += d.gauss_curvature[j];
        sa += d.second_fundamental_sq[j];
        ++cnt;
      }
    if (cnt) {
      H[i] = sh / cnt;
      K[i] = sk / cnt;
      A2[i] = sa / cnt;
    }
  }
  d.mean_curvature.swap(H);
  d.gauss_curvature.swap(K);
  d.second_fundamental_sq.swap(A2);
  return d;
}

}  // namespace shrinker
