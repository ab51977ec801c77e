#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "shrinker/mesh.hpp"
#include "shrinker/quadrature.hpp"
#include "shrinker/tightening.hpp"

namespace shrinker {

struct Slice {
  enum class Kind { Mesh, Plane, Empty };
  Kind kind = Kind::Empty;
  TriMesh mesh;                    // Mesh
  Vec3 normal = Vec3::UnitZ();     // Plane: {<y, normal> = offset}
  double offset = 0;
  // How a canonical slice was produced: s (Sigma - t) with these values.
  Vec3 center = Vec3::Zero();
  double dilation = 0;
};

// Gaussian area: e^{-offset^2/4} for planes, 0 for the empty slice.
double slice_area(const Slice& s, const QuadratureSpec& q = {});

// tau <-> s: s = tan(pi tau / 2).
double dilation_of(double tau);

// Deterministic and parallel-safe after construction.
class SweepoutFamily {
 public:
  enum class Kind { Canonical, PlaneFamily, SphereFamily, TranslatedSphereFamily };

  // Sigma_{t, s} = s (Sigma - t) with the boundary blow-up collar of width
  // epsilon around Sigma x {1}. Fails (collar) if epsilon >= 1/(2 max|A|).
  static SweepoutFamily canonical(const TriMesh& mesh, double epsilon = 0.05);
  static SweepoutFamily plane_family();                       // z = tan(pi (tau - 1/2))
  static SweepoutFamily sphere_family(int refinement = 4);    // radius tan(pi tau / 2)
  static SweepoutFamily translated_sphere_family(double shift, int refinement = 4);

  Kind kind() const { return kind_; }
  bool uses_center() const { return kind_ == Kind::Canonical; }
  double epsilon() const { return epsilon_; }
  double shift() const { return shift_; }
  const TriMesh& mesh() const { return *mesh_; }

  Slice slice(const Vec3& t, double tau) const;
  double area(const Vec3& t, double tau, const QuadratureSpec& q = {}) const;
  // Same, with fixed quadrature nodes for mesh slices of the canonical
  // family (used by coarse scans).
  double coarse_area(const Vec3& t, double tau) const;
  // Closed form for the sphere and plane families.
  std::optional<double> analytic_area(double tau) const;
  // Gaussian volume enclosed by the slice (planes: the side below).
  double enclosed_volume(const Vec3& t, double tau, long long samples, std::uint64_t seed) const;

  // Collar coordinates of a parameter point: nearest point p, normal at p
  // and signed distance rho (negative outside).
  struct Collar {
    Vec3 p = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    double rho = 0;
    double radius = 0;  // |(rho, 1 - tau)|
  };
  Collar collar(const Vec3& t, double tau) const;

 private:
  struct Shared;
  SweepoutFamily() = default;
  Slice sphere_slice(double tau) const;
  // Parameters actually evaluated after the blow-up map, or a plane/empty.
  // Mesh slices come back without geometry (center and dilation only).
  Slice canonical_resolve(const Vec3& t, double tau) const;

  Kind kind_ = Kind::PlaneFamily;
  double epsilon_ = 0;
  double shift_ = 0;
  std::shared_ptr<const TriMesh> mesh_;
  std::shared_ptr<const Shared> shared_;
};

Slice canonical_slice(const TriMesh& mesh, const Vec3& t, double tau, double epsilon = 0.05);

struct WidthGrid {
  int t_points = 9;      // per axis, over the bounding box inflated by `inflate` diameters
  double inflate = 1.0;
  int tau_points = 33;
  int refine_factor = 4;  // 0: no refinement pass
  int rescore = 8;        // coarse cells re-evaluated with adaptive quadrature
  QuadratureSpec quad{};
};

struct WidthSample {
  Vec3 t = Vec3::Zero();
  double tau = 0;
  double area = 0;
};

struct WidthReport {
  WidthGrid grid;
  std::vector<WidthSample> samples;  // coarse lattice, fixed-node values for canonical families
  double max_area = 0;
  Vec3 argmax_t = Vec3::Zero();
  double argmax_tau = 0;
  double tau_step = 0;
  std::vector<double> history;        // max after the coarse pass, after refinement
  std::optional<double> analytic_max;  // sphere/plane families, closed form on the refined grid
};

WidthReport width_upper_bound(const SweepoutFamily& family, const WidthGrid& grid = {});

struct IsoperimetricPath {
  Vec3 t = Vec3::Zero();  // canonical: fixed center
  double tau_lo = 1e-3, tau_hi = 1 - 1e-3;
  long long samples = 200000;
  std::uint64_t seed = 0;
  double tau_tol = 1e-6;
};

struct IsoperimetricBound {
  double floor = 1;      // isoperimetric profile at volume 1/2
  double tau_half = 0;
  double volume = 0;     // enclosed volume at tau_half
  double slice_area = 0;
};

IsoperimetricBound width_lower_bound_isoperimetric(const SweepoutFamily& family, const IsoperimetricPath& path = {});

struct GaussDegree {
  int degree = 0;
  double raw = 0;       // (1/4 pi) sum of signed solid angles
  double residual = 0;  // |raw - degree|
};

// Signed area of the vertex-normal image, per face, over 4 pi.
GaussDegree gauss_degree(const TriMesh& mesh);

struct MinmaxLocation {
  Slice slice;
  Vec3 t = Vec3::Zero();
  double tau = 0;
  double area = 0;
  StationarityGap gap;
  double plane_distance = 0;  // distance to the plane member
};

MinmaxLocation minmax_locate(const SweepoutFamily& family, const WidthReport& report,
                             const ShrinkerLibrary& lib = ShrinkerLibrary::standard());

}  // namespace shrinker
