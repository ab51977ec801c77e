#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shrinker/mesh.hpp"
#include "shrinker/quadrature.hpp"

namespace shrinker {

struct DensityParams {
  Vec3 x0 = Vec3::Zero();
  double t0 = 1.0;
};

struct AreaResult {
  double value = 0;            // mesh integral + tail
  double tail_correction = 0;
  double error_estimate = 0;   // |difference between two rule orders|
};

// F = (1/4pi) \int exp(-|x|^2/4) dA, including the mesh's analytic tail.
AreaResult gaussian_area(const TriMesh& mesh, const QuadratureSpec& q = {});
AreaResult gaussian_area(const TriMesh& mesh, const QuadratureSpec& q, const std::optional<AnalyticTail>& tail);

// F_{x0,t0} = \int (4 pi t0)^{-1} exp(-|x-x0|^2/(4 t0)) dA, including tail.
double f_density(const TriMesh& mesh, const DensityParams& p, const QuadratureSpec& q = {});

struct DensityGradient {
  double value = 0;
  Vec3 d_x0 = Vec3::Zero();
  double d_log_t0 = 0;
};
// Value and gradient in (x0, log t0); mesh part analytic, tail part by
// central differences of the closed form.
DensityGradient f_density_gradient(const TriMesh& mesh, const DensityParams& p, const QuadratureSpec& q = {});

// x -> s (x - t), tail included.
TriMesh translate_dilate(const TriMesh& mesh, const Vec3& t, double s);

struct EnclosedVolume {
  double value = 0;
  double standard_error = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
};
// Gaussian measure (4 pi)^{-3/2} \int_Omega exp(-|x|^2/4) of the enclosed
// region, by +z ray parity on samples from N(0, 2I).
EnclosedVolume gaussian_enclosed_volume(const TriMesh& mesh, long long samples, std::uint64_t seed);

// Gaussian measure of {z > d}: erfc(d/2)/2.
double halfspace_volume(double d);
// exp(-d^2/4) where halfspace_volume(d) = v.
double isoperimetric_profile(double v);

struct VolumeGrowthRecord {
  double radius = 0;
  double euclidean_mass = 0;
  double bound = 0;
  bool pass = false;
};
// Euclidean area inside B(0, r) against e^{1/4} 4 pi F r^2.
std::vector<VolumeGrowthRecord> volume_growth_check(const TriMesh& mesh, const std::vector<double>& radii,
                                                    const QuadratureSpec& q = {});

// Exact Euclidean area of mesh inside the ball (mesh faces only).
double euclidean_area_in_ball(const TriMesh& mesh, const Vec3& center, double radius);

// Gaussian area restricted to |x| > R (R <= 0: whole area).
double mass_near_infinity(const TriMesh& mesh, double R, const QuadratureSpec& q = {});
// Gaussian area restricted to r0 < |x| <= r1, mesh and tail.
double mass_in_annulus(const TriMesh& mesh, double r0, double r1, const QuadratureSpec& q = {});

struct PlaneFit {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0;         // >= 0, plane is {<x, normal> = offset}
  double rms_deviation = 0;  // Gaussian-weighted orthogonal RMS
  double area_deviation = 0; // |F - F(plane)|
  double distance_proxy = 0; // rms + area deviation
  double area = 0;           // F of the (restricted) mesh
};
// Gaussian-weighted PCA plane. With ball_radius, only the part inside
// B(0, ball_radius) is used and compared with the equally restricted plane.
// Moments use the mesh only; F includes the tail when unrestricted.
PlaneFit nearest_plane(const TriMesh& mesh, const QuadratureSpec& q = {},
                       std::optional<double> ball_radius = std::nullopt);

}  // namespace shrinker
