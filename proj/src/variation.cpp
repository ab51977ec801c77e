#include "shrinker/variation.hpp"

#include <cmath>

#include "shrinker/differential.hpp"
#include "shrinker/error.hpp"

namespace shrinker {

double first_variation(const TriMesh& mesh, const VectorFieldSpec& field, const QuadratureSpec& q,
                       VariationMode mode) {
  q.validate();
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  if (field.kind == VectorFieldSpec::Kind::Sampled || mode == VariationMode::Interpolated) {
    const std::vector<Vec3> v = field_at_vertices(field, mesh);
    std::vector<double> div(mesh.num_faces());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
      Vec3 g[3];
      face_hat_gradients(mesh, f, g);
      const Face& t = mesh.face(f);
      div[f] = g[0].dot(v[t[0]]) + g[1].dot(v[t[1]]) + g[2].dot(v[t[2]]);
    }
    auto fn = [&](std::size_t f, const Vec3& b, const Vec3& x, double wd, std::array<NeumaierSum, 1>& acc) {
      const Face& t = mesh.face(f);
      const Vec3 X = b[0] * v[t[0]] + b[1] * v[t[1]] + b[2] * v[t[2]];
      acc[0].add((div[f] - 0.5 * X.dot(x)) * wd);
    };
    return integrate_mesh<1>(mesh, w, q, fn)[0];
  }
  BallClip breaks;
  breaks.breaks = field_breaks(field);
  auto fn = [&](std::size_t f, const Vec3&, const Vec3& x, double wd, std::array<NeumaierSum, 1>& acc) {
    const FieldJet j = evaluate_field(field, x);
    const Vec3 n = mesh.face_normal(f);
    const double div = j.jacobian.trace() - n.dot(j.jacobian * n);
    acc[0].add((div - 0.5 * j.value.dot(x)) * wd);
  };
  return integrate_mesh<1>(mesh, w, q, fn, breaks)[0];
}

TriMesh euler_step(const TriMesh& mesh, const VectorFieldSpec& field, double h) {
  std::vector<Vec3> v = field_at_vertices(field, mesh);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mesh.vertex(i) + h * v[i];
  return mesh.with_vertices(std::move(v));
}

ResidualReport shrinker_residual(const TriMesh& mesh) {
  const DifferentialData d = differential_data(mesh);
  ResidualReport r;
  r.per_vertex.resize(mesh.num_vertices());
  double s = 0;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const Vec3& x = mesh.vertex(i);
    const double ri = d.mean_curvature[i] - 0.5 * x.dot(d.normal[i]);
    r.per_vertex[i] = ri;
    if (mesh.is_boundary(i)) continue;
    s += ri * ri * d.area[i] * std::exp(-x.squaredNorm() / 4) / (4 * M_PI);
    r.sup = std::max(r.sup, std::abs(ri));
  }
  r.l2 = std::sqrt(s);
  return r;
}

int morse_index(const StabilitySpectrum& s, double tol) {
  if (!(tol >= 0)) fail(ErrorCode::Parameter, "variation", "tolerance must be non-negative");
  if (s.eigenvalues.empty() || s.eigenvalues.back() >= -tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "smallest of %zu computed eigenvalues is %.6g >= -tol; request more modes",
                  s.eigenvalues.size(), s.eigenvalues.empty() ? 0.0 : s.eigenvalues.back());
    fail(ErrorCode::Inconclusive, "variation", buf);
  }
  int n = 0;
  for (double l : s.eigenvalues) n += l > tol;
  return n;
}

}  // namespace shrinker
