#pragma once

#include <Eigen/Core>

namespace shrinker {

using Vec3 = Eigen::Vector3d;

// Closest point of triangle (a,b,c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Same, also returning barycentric coordinates of the result.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                               Vec3& bary);

// Orthonormal e1, e2 with e1 x e2 = n for unit n.
void orthonormal_frame(const Vec3& n, Vec3& e1, Vec3& e2);

// Angle between two vectors in [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

}  // namespace shrinker
