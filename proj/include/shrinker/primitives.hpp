#pragma once

#include <string>

#include "shrinker/mesh.hpp"

namespace shrinker {

enum class PrimitiveKind { Sphere, Cylinder, Torus, Ellipsoid, PerturbedSphere, PlaneDisk, DoubleTorus };

PrimitiveKind parse_primitive_kind(const std::string& name);
std::string primitive_kind_name(PrimitiveKind kind);

struct PrimitiveParams {
  double radius = 2.0;        // sphere, cylinder, perturbed_sphere, plane_disk
  double half_length = 8.0;   // cylinder
  double major_radius = 3.0;  // torus
  double minor_radius = 1.0;  // torus
  Vec3 semi_axes{2.2, 2.0, 1.8};
  double epsilon = 0.1;       // perturbed_sphere amplitude
  int harmonic_degree = 4;    // perturbed_sphere zonal harmonic
  Vec3 axis = Vec3::UnitZ();  // cylinder axis, plane normal, perturbation axis
  double offset = 0.0;        // plane_disk: signed distance along axis
  Vec3 center = Vec3::Zero(); // translation applied to closed primitives
  bool with_tail = true;      // cylinder, plane_disk
  double scale = 1.0;         // double_torus unit-cell size
};

// Closed: sphere, torus, ellipsoid, perturbed_sphere, double_torus. Cylinder
// and plane_disk have rims and, if requested, an analytic tail.
TriMesh generate_primitive(PrimitiveKind kind, const PrimitiveParams& params, int refinement);

// Unit icosphere with `refinement` midpoint subdivisions projected to the
// sphere: 10*4^k + 2 vertices.
TriMesh unit_icosphere(int refinement);

}  // namespace shrinker
