#include "shrinker/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Geometry>

#include "shrinker/error.hpp"

namespace shrinker {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::string metadata)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), metadata_(std::move(metadata)) {
  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& t = faces_[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv)
        fail(ErrorCode::Parameter, "mesh-core",
             "face " + std::to_string(f) + " references vertex " + std::to_string(t[k]));
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      fail(ErrorCode::Parameter, "mesh-core", "face " + std::to_string(f) + " repeats a vertex");
  }
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) fail(ErrorCode::Parameter, "mesh-core", "non-finite vertex coordinate");
  }
  // Degeneracy is judged relative to the mesh scale so that dilations of a
  // valid mesh stay valid.
  const double d = diameter();
  const double tol = 1e-12 * std::max(d * d, 1e-300);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (!(face_area(f) > tol))
      fail(ErrorCode::Parameter, "mesh-core", "face " + std::to_string(f) + " is degenerate");
  }
  compute_boundary();
}

void TriMesh::compute_boundary() {
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(faces_.size() * 3);
  for (const Face& t : faces_)
    for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
  boundary_.assign(vertices_.size(), false);
  for (const Face& t : faces_)
    for (int k = 0; k < 3; ++k)
      if (count[edge_key(t[k], t[(k + 1) % 3])] == 1) {
        boundary_[t[k]] = true;
        boundary_[t[(k + 1) % 3]] = true;
      }
}

bool TriMesh::is_closed() const {
  return std::none_of(boundary_.begin(), boundary_.end(), [](bool b) { return b; });
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
  if (vertices.size() != vertices_.size())
    fail(ErrorCode::Parameter, "mesh-core", "vertex count mismatch");
  TriMesh m;
  m.vertices_ = std::move(vertices);
  m.faces_ = faces_;
  m.boundary_ = boundary_;
  m.metadata_ = metadata_;
  return m;
}

TriMesh TriMesh::with_tail(std::optional<AnalyticTail> tail) const {
  TriMesh m = *this;
  m.tail_ = std::move(tail);
  return m;
}

TriMesh TriMesh::with_metadata(std::string metadata) const {
  TriMesh m = *this;
  m.metadata_ = std::move(metadata);
  return m;
}

double TriMesh::face_area(std::size_t f) const {
  const Face& t = faces_[f];
  return 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
}

Vec3 TriMesh::face_normal(std::size_t f) const {
  const Face& t = faces_[f];
  Vec3 n = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
  double len = n.norm();
  return len > 0 ? Vec3(n / len) : Vec3::Zero();
}

double TriMesh::euclidean_area() const {
  double s = 0;
  for (std::size_t f = 0; f < faces_.size(); ++f) s += face_area(f);
  return s;
}

void TriMesh::bounding_box(Vec3& lo, Vec3& hi) const {
  lo = Vec3::Constant(0);
  hi = Vec3::Constant(0);
  if (vertices_.empty()) return;
  lo = hi = vertices_[0];
  for (const Vec3& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

double TriMesh::diameter() const {
  Vec3 lo, hi;
  bounding_box(lo, hi);
  return (hi - lo).norm();
}

TriMesh merge_meshes(const std::vector<TriMesh>& parts, std::string metadata) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (const TriMesh& p : parts) {
    int off = static_cast<int>(v.size());
    v.insert(v.end(), p.vertices().begin(), p.vertices().end());
    for (Face t : p.faces()) f.push_back({t[0] + off, t[1] + off, t[2] + off});
  }
  return TriMesh(std::move(v), std::move(f), std::move(metadata));
}

TriMesh rigid_transform(const TriMesh& mesh, const Eigen::Matrix3d& R, const Vec3& b) {
  std::vector<Vec3> v;
  v.reserve(mesh.num_vertices());
  for (const Vec3& x : mesh.vertices()) v.push_back(R * x + b);
  TriMesh out = mesh.with_vertices(std::move(v));
  if (mesh.tail()) out = out.with_tail(rigid_transform_tail(*mesh.tail(), R, b));
  return out;
}

}  // namespace shrinker
