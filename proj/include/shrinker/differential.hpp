#pragma once

#include <string>
#include <vector>

#include "shrinker/mesh.hpp"

namespace shrinker {

// Per-vertex discrete geometry. H is the sum of principal curvatures with
// respect to the outward normal (H = 2/R on a sphere of radius R).
struct DifferentialData {
  std::vector<Vec3> normal;           // angle-weighted, unit
  std::vector<double> mean_curvature; // from the cotan Laplacian of position
  std::vector<double> gauss_curvature;// angle deficit over mixed area
  std::vector<double> second_fundamental_sq;  // |A|^2 = max(H^2 - 2K, 0)
  std::vector<double> area;           // mixed Voronoi area
  std::vector<bool> reliable;         // false on rims and next to slivers
  std::vector<std::string> warnings;
};

DifferentialData differential_data(const TriMesh& mesh);

// Interior angles of face f at its three corners.
void face_angles(const TriMesh& mesh, std::size_t f, double angles[3]);

// Aspect measure longest_edge^2 / (2 area); 1e6 marks a sliver.
double face_aspect(const TriMesh& mesh, std::size_t f);

// Sorted one-ring neighbours of every vertex.
std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh);

// Minimum interior angle over all faces, radians.
double min_face_angle(const TriMesh& mesh);

}  // namespace shrinker
