#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "shrinker/cutoff.hpp"
#include "shrinker/mesh.hpp"

namespace shrinker {

struct CutoffSpec {
  double rho = 4.0;
  double epsilon = 0.05;
  void validate() const;
};

struct VectorFieldSpec {
  enum class Kind { AnalyticRadial, Constant, Position, Sampled };
  Kind kind = Kind::Position;
  CutoffSpec cutoff;              // AnalyticRadial: phi(r/rho) x / r^2
  Vec3 constant = Vec3::Zero();   // Constant
  std::vector<Vec3> samples;      // Sampled: per-vertex values, linear on faces
  // Multiplies analytic kinds by b(|x|) = 1 - S(|x| / support_radius - 1)
  // with S the quintic smoothstep: 1 inside support_radius, 0 beyond twice it.
  std::optional<double> support_radius;
  double scale = 1.0;

  static VectorFieldSpec radial(const CutoffSpec& c);
  static VectorFieldSpec constant_field(const Vec3& v, std::optional<double> support = std::nullopt);
  static VectorFieldSpec position(std::optional<double> support = std::nullopt);
  static VectorFieldSpec sampled(std::vector<Vec3> values);
};

struct FieldJet {
  Vec3 value = Vec3::Zero();
  Eigen::Matrix3d jacobian = Eigen::Matrix3d::Zero();  // J_ij = d X_i / d x_j
};

// Quintic smoothstep on [0, 1] and its derivative.
double support_bump_step(double u);
double support_bump_step_slope(double u);

// Radii where an analytic field is only piecewise smooth.
std::vector<double> field_breaks(const VectorFieldSpec& field);

// Analytic kinds only.
FieldJet evaluate_field(const VectorFieldSpec& field, const Vec3& x);

// Field value at every vertex (any kind).
std::vector<Vec3> field_at_vertices(const VectorFieldSpec& field, const TriMesh& mesh);

// Sampled C^1 norm on a mesh: max(sup |X|, sup ||DX||). Sampled fields use
// per-face gradients of the linear interpolant.
double field_c1_norm(const VectorFieldSpec& field, const TriMesh& mesh);

// Gradients of the three barycentric hat functions on face f (tangent vectors).
void face_hat_gradients(const TriMesh& mesh, std::size_t f, Vec3 grad[3]);

}  // namespace shrinker
