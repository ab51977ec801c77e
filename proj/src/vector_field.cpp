#include "shrinker/vector_field.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "shrinker/error.hpp"

namespace shrinker {

double support_bump_step(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  return u * u * u * (10 + u * (-15 + 6 * u));
}

double support_bump_step_slope(double u) {
  if (u <= 0 || u >= 1) return 0;
  return 30 * u * u * (1 - u) * (1 - u);
}

void CutoffSpec::validate() const {
  if (!(rho > 0)) fail(ErrorCode::Parameter, "radial-flow", "rho must be positive");
  if (!(epsilon > 0)) fail(ErrorCode::Parameter, "radial-flow", "epsilon must be positive");
}

VectorFieldSpec VectorFieldSpec::radial(const CutoffSpec& c) {
  c.validate();
  VectorFieldSpec f;
  f.kind = Kind::AnalyticRadial;
  f.cutoff = c;
  return f;
}

VectorFieldSpec VectorFieldSpec::constant_field(const Vec3& v, std::optional<double> support) {
  VectorFieldSpec f;
  f.kind = Kind::Constant;
  f.constant = v;
  f.support_radius = support;
  return f;
}

VectorFieldSpec VectorFieldSpec::position(std::optional<double> support) {
  VectorFieldSpec f;
  f.kind = Kind::Position;
  f.support_radius = support;
  return f;
}

VectorFieldSpec VectorFieldSpec::sampled(std::vector<Vec3> values) {
  VectorFieldSpec f;
  f.kind = Kind::Sampled;
  f.samples = std::move(values);
  return f;
}

FieldJet evaluate_field(const VectorFieldSpec& field, const Vec3& x) {
  FieldJet j;
  switch (field.kind) {
    case VectorFieldSpec::Kind::Constant:
      j.value = field.constant;
      break;
    case VectorFieldSpec::Kind::Position:
      j.value = x;
      j.jacobian = Eigen::Matrix3d::Identity();
      break;
    case VectorFieldSpec::Kind::AnalyticRadial: {
      const double r = x.norm();
      const double rho = field.cutoff.rho;
      if (r <= rho) break;  // phi vanishes, and with it the whole jet
      CutoffProfile phi(field.cutoff.epsilon);
      const double s = r / rho, p = phi.value(s), dp = phi.slope(s);
      const double g = p / (r * r);
      const double gr = dp / (rho * r * r) - 2 * p / (r * r * r);  // dg/dr
      j.value = g * x;
      j.jacobian = g * Eigen::Matrix3d::Identity() + (gr / r) * x * x.transpose();
      break;
    }
    case VectorFieldSpec::Kind::Sampled:
      fail(ErrorCode::Parameter, "variation", "sampled fields have no pointwise jet");
  }
  if (field.support_radius) {
    const double R = *field.support_radius;
    if (!(R > 0)) fail(ErrorCode::Parameter, "variation", "support radius must be positive");
    const double r = x.norm();
    const double b = 1 - support_bump_step(r / R - 1);
    Vec3 db = Vec3::Zero();
    if (r > 0) db = -support_bump_step_slope(r / R - 1) / R * x / r;
    j.jacobian = b * j.jacobian + j.value * db.transpose();
    j.value *= b;
  }
  j.value *= field.scale;
  j.jacobian *= field.scale;
  return j;
}

std::vector<Vec3> field_at_vertices(const VectorFieldSpec& field, const TriMesh& mesh) {
  if (field.kind == VectorFieldSpec::Kind::Sampled) {
    if (field.samples.size() != mesh.num_vertices())
      fail(ErrorCode::Parameter, "variation", "sampled field size does not match the mesh");
    std::vector<Vec3> v = field.samples;
    for (Vec3& x : v) x *= field.scale;
    return v;
  }
  std::vector<Vec3> v;
  v.reserve(mesh.num_vertices());
  for (const Vec3& x : mesh.vertices()) v.push_back(evaluate_field(field, x).value);
  return v;
}

void face_hat_gradients(const TriMesh& mesh, std::size_t f, Vec3 grad[3]) {
  const Face& t = mesh.face(f);
  const Vec3 n = (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0]));
  const double a2 = n.squaredNorm();  // (2 area)^2
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = mesh.vertex(t[(k + 2) % 3]) - mesh.vertex(t[(k + 1) % 3]);  // opposite edge
    grad[k] = n.cross(e) / a2;
  }
}

double field_c1_norm(const VectorFieldSpec& field, const TriMesh& mesh) {
  double c1 = 0;
  if (field.kind == VectorFieldSpec::Kind::Sampled) {
    std::vector<Vec3> v = field_at_vertices(field, mesh);
    for (const Vec3& x : v) c1 = std::max(c1, x.norm());
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
      Vec3 g[3];
      face_hat_gradients(mesh, f, g);
      Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
      for (int k = 0; k < 3; ++k) G += v[mesh.face(f)[k]] * g[k].transpose();
      c1 = std::max(c1, Eigen::JacobiSVD<Eigen::Matrix3d>(G).singularValues()(0));
    }
    return c1;
  }
  for (const Vec3& x : mesh.vertices()) {
    FieldJet j = evaluate_field(field, x);
    c1 = std::max({c1, j.value.norm(), Eigen::JacobiSVD<Eigen::Matrix3d>(j.jacobian).singularValues()(0)});
  }
  return c1;
}

}  // namespace shrinker

namespace shrinker {

std::vector<double> field_breaks(const VectorFieldSpec& field) {
  std::vector<double> b;
  if (field.kind == VectorFieldSpec::Kind::AnalyticRadial) {
    const double rho = field.cutoff.rho, d = CutoffProfile(field.cutoff.epsilon).ramp_width();
    b = {rho, rho * (1 + d), rho * (2 - d), 2 * rho};
  }
  if (field.support_radius) {
    b.push_back(*field.support_radius);
    b.push_back(2 * *field.support_radius);
  }
  return b;
}

}  // namespace shrinker
