#pragma once

#include <optional>

#include "shrinker/mesh.hpp"
#include "shrinker/quadrature.hpp"
#include "shrinker/vector_field.hpp"

namespace shrinker {

struct RadialField {
  VectorFieldSpec field;  // phi(r/rho) x / r^2
  double c1_norm = 0;     // sampled sup ||DX|| over a dense radial grid
};

RadialField radial_field(const CutoffSpec& spec);

// div^G_S X = phi (2 c^2 / r^2 - 1/2) + (r/rho) phi' (1 - c^2) / r^2, with
// c = <x/r, unit_normal>.
double gaussian_divergence(const CutoffSpec& spec, const Vec3& x, const Vec3& unit_normal);

// Time-t flow of X. Without spec: the pure field x / r^2, closed form
// sqrt(1 + 2t/r^2) x. With spec: RK4 through the cutoff annulus, closed form
// beyond 2 rho.
Vec3 radial_flow_map(double t, const Vec3& x, const std::optional<CutoffSpec>& spec = std::nullopt);

struct FlowJacobian {
  double euclidean = 1;  // area distortion of the plane through x with given normal
  double gaussian = 1;   // euclidean * exp(-(|f(x)|^2 - |x|^2) / 4)
  double radial_stretch = 1;      // d|f| / d|x|
  double tangential_stretch = 1;  // |f| / |x|
};

FlowJacobian flow_jacobian(double t, const Vec3& x, const Vec3& unit_normal,
                           const std::optional<CutoffSpec>& spec = std::nullopt);

struct PushforwardArea {
  double jacobian_path = 0;  // \int rho(f_t x) J_t dA on the source mesh
  double mesh_path = 0;      // Gaussian area of the vertex-mapped mesh
};

// Mesh part only; tails are not transported.
PushforwardArea pushforward_area(const TriMesh& mesh, double t, const CutoffSpec& spec,
                                 const QuadratureSpec& q = {});

// \int div^G_S X d(Gaussian area) over the mesh, face normals as S.
double radial_first_variation(const TriMesh& mesh, const CutoffSpec& spec, const QuadratureSpec& q = {});

// Stereographic chart of S^3 \ {north} restricted to R^3: x -> 2x/(1+|x|^2)
// with last coordinate (|x|^2 - 1)/(|x|^2 + 1). Diagnostics only.
Eigen::Vector4d stereographic_lift(const Vec3& x);

}  // namespace shrinker
