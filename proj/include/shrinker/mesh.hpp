#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shrinker/tail.hpp"

namespace shrinker {

using Face = std::array<int, 3>;

// Indexed triangle mesh. Immutable after construction; modified copies are
// produced by the with_* helpers. Boundary flags are derived from edges that
// belong to a single face.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::string metadata = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<bool>& boundary() const { return boundary_; }
  const std::string& metadata() const { return metadata_; }
  const std::optional<AnalyticTail>& tail() const { return tail_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  const Face& face(std::size_t f) const { return faces_[f]; }
  bool is_boundary(std::size_t i) const { return boundary_[i]; }
  bool is_closed() const;

  // Same connectivity, new positions. Drops the analytic tail, which no
  // longer matches moved geometry. Degeneracy is not re-checked here.
  TriMesh with_vertices(std::vector<Vec3> vertices) const;
  TriMesh with_tail(std::optional<AnalyticTail> tail) const;
  TriMesh with_metadata(std::string metadata) const;

  double face_area(std::size_t f) const;
  Vec3 face_normal(std::size_t f) const;  // unit, from orientation
  double euclidean_area() const;
  double diameter() const;  // bounding-box diagonal
  void bounding_box(Vec3& lo, Vec3& hi) const;

 private:
  void compute_boundary();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<bool> boundary_;
  std::string metadata_;
  std::optional<AnalyticTail> tail_;
};

// Disjoint union (no tails).
TriMesh merge_meshes(const std::vector<TriMesh>& parts, std::string metadata = {});

// x -> R x + b applied to vertices and tail.
TriMesh rigid_transform(const TriMesh& mesh, const Eigen::Matrix3d& R, const Vec3& b);

}  // namespace shrinker
