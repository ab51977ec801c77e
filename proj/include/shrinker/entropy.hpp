#pragma once

#include <optional>
#include <vector>

#include "shrinker/gaussian_measure.hpp"
#include "shrinker/mesh.hpp"

namespace shrinker {

// Fixed quadrature nodes of a mesh (no adaptivity) for fast repeated
// evaluation of F_{x0,t0}. Tails are added in closed form.
class DensityProbe {
 public:
  explicit DensityProbe(const TriMesh& mesh, int order = 3);
  double operator()(const DensityParams& p) const;

 private:
  std::vector<Vec3> node_;
  std::vector<double> weight_;  // rule weight * area
  std::optional<AnalyticTail> tail_;
};

struct EntropyOptions {
  // Grid of x0 over the bounding box inflated by `inflate` diameters, and of
  // log t0 over [lo, hi]; defaults cover +-2 |log diam| + 1 about 2 log(diam/4).
  double inflate = 1.0;
  int grid_points = 7;  // per spatial axis
  int t_points = 9;
  std::optional<double> log_t_min, log_t_max;
  int starts = 5;
  double refine_tol = 1e-9;  // on the scaled gradient norm
  int max_iterations = 200;
  QuadratureSpec quad{};
};

struct EntropyTracePoint {
  DensityParams params;
  double value = 0;
  int start = 0;
};

struct EntropyResult {
  double lambda = 0;
  DensityParams argmax;
  int starts_used = 0;
  std::vector<EntropyTracePoint> trace;
};

EntropyResult entropy(const TriMesh& mesh, const EntropyOptions& opts = {});

struct CenterGrid {
  double half_extent = 1.0;  // x0 in [-e, e]^3
  int points = 11;           // per axis, odd so that 0 is included
  double t_min = 0.25, t_max = 4.0;
  int t_points = 11;         // log-spaced, odd so that 1 is included
  double tolerance = 1e-3;
  double residual_gate = 5e-2;
};

struct CenterCheck {
  double grid_max = 0;
  DensityParams grid_argmax;
  double value_at_origin = 0;  // F_{0,1}
  double residual_sup = 0;
  bool pass = false;
};

// Requires shrinker_residual sup < residual_gate.
CenterCheck shrinker_center_check(const TriMesh& mesh, const CenterGrid& grid = {});

struct DilationSample {
  double s = 0;
  double g = 0;
  double dg_fd = 0;        // central difference
  double dg_analytic = 0;  // chain rule through the density gradient
};

struct DilationReport {
  std::vector<DilationSample> samples;
  double residual_sup = 0;
  bool pass = false;  // all dg_fd <= tolerance
};

// g(s) = F_{s y, 1 + a s^2}.
DilationReport dilation_monotonicity(const TriMesh& mesh, const Vec3& y, double a, const std::vector<double>& s,
                                     double tolerance = 2e-3, double residual_gate = 5e-2);

}  // namespace shrinker
