#include <doctest.h>

#include <cmath>
#include <random>

#include "shrinker/cutoff.hpp"
#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/radial_flow.hpp"
#include "shrinker/variation.hpp"

using namespace shrinker;

namespace {

TriMesh sphere(double R, int ref) {
  PrimitiveParams p;
  p.radius = R;
  return generate_primitive(PrimitiveKind::Sphere, p, ref);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return Vec3(nd(rng), nd(rng), nd(rng)).normalized();
}

// Plain RK4 of x' = X(x) in R^3 with a fixed small step.
Vec3 integrate_field(const VectorFieldSpec& f, Vec3 x, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Vec3 k1 = evaluate_field(f, x).value;
    const Vec3 k2 = evaluate_field(f, x + 0.5 * h * k1).value;
    const Vec3 k3 = evaluate_field(f, x + 0.5 * h * k2).value;
    const Vec3 k4 = evaluate_field(f, x + h * k3).value;
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST_CASE("cutoff profile bounds and derivatives") {
  for (double eps : {0.05, 0.01, 0.3}) {
    CutoffProfile phi(eps);
    CHECK(phi.value(0.5) == 0.0);
    CHECK(phi.value(1.0) == 0.0);
    CHECK(phi.value(2.0) == 1.0);
    CHECK(phi.value(7.0) == 1.0);
    const int n = 200000;
    double prev = 0;
    for (int i = 0; i <= n; ++i) {
      const double s = 0.9 + 1.2 * i / n;
      const double v = phi.value(s), d = phi.slope(s);
      CHECK(d >= 0);
      CHECK(d <= 1 + eps);
      CHECK(v >= prev - 1e-15);
      CHECK(std::abs(v - prev) < 1e-4);  // continuity
      prev = v;
    }
    const double h = 1e-6;
    for (double s : {1.001, 1.01, 1.02, 1.3, 1.5, 1.97, 1.995}) {
      CHECK(std::abs((phi.value(s + h) - phi.value(s - h)) / (2 * h) - phi.slope(s)) < 1e-6);
      CHECK(std::abs((phi.slope(s + h) - phi.slope(s - h)) / (2 * h) - phi.curvature(s)) < 1e-4);
    }
  }
  CHECK_THROWS_AS(CutoffProfile(0.0), Error);
}

TEST_CASE("radial field") {
  auto rf = radial_field({4, 0.05});
  CHECK(rf.c1_norm <= 1);
  for (double rho : {3.01, 5.0, 10.0}) CHECK(radial_field({rho, 0.05}).c1_norm <= 1);

  // Closed-form eigenvalues of DX: phi/r^2 (tangential) and phi'/(rho r) - phi/r^2 (radial).
  CutoffProfile phi(0.05);
  double oracle = 0;
  for (int i = 0; i <= 400000; ++i) {
    const double r = 4 * (1 + 2.0 * i / 400000);
    const double p = phi.value(r / 4), dp = phi.slope(r / 4);
    oracle = std::max({oracle, std::abs(p / (r * r)), std::abs(dp / (4 * r) - p / (r * r))});
  }
  CHECK(std::abs(rf.c1_norm - oracle) < 1e-6);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec3 u = random_unit(rng);
    CHECK(evaluate_field(rf.field, 3.99 * u).value == Vec3::Zero());
    CHECK(evaluate_field(rf.field, 4.0 * u).value == Vec3::Zero());
  }
  const Vec3 x(16, 0, 0);
  const Vec3 X = evaluate_field(rf.field, x).value;
  CHECK((X - x / 256).norm() < 1e-15);
  CHECK(std::abs(X.norm() - 1.0 / 16) < 1e-15);
}

TEST_CASE("gaussian divergence regimes") {
  const CutoffSpec s{4, 0.05};
  CHECK(gaussian_divergence(s, Vec3(1, 2, 2), Vec3::UnitZ()) == 0.0);
  CHECK(gaussian_divergence(s, Vec3(4, 0, 0), Vec3::UnitY()) == 0.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const double r = 1e6;
    CHECK(std::abs(gaussian_divergence(s, r * random_unit(rng), random_unit(rng)) + 0.5) <= 1e-6 + 2 / (r * r));
  }
  const double r = 12;
  CHECK(std::abs(gaussian_divergence(s, Vec3(r, 0, 0), Vec3::UnitX()) - (2 / (r * r) - 0.5)) < 1e-12);
  CHECK_THROWS_AS(gaussian_divergence(s, Vec3::Zero(), Vec3::UnitZ()), Error);
}

TEST_CASE("gaussian divergence against the field jacobian") {
  const CutoffSpec s{2.5, 0.05};
  const auto f = VectorFieldSpec::radial(s);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ur(0.1, 8);
  double worst = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec3 x = ur(rng) * random_unit(rng), n = random_unit(rng);
    const FieldJet j = evaluate_field(f, x);
    const double via_jet = j.jacobian.trace() - n.dot(j.jacobian * n) - 0.5 * j.value.dot(x);
    const double d = gaussian_divergence(s, x, n);
    CHECK(std::abs(d - via_jet) < 1e-12);
    worst = std::max(worst, std::abs(d));
  }
  CHECK(worst <= 0.5 + 2 * (1 + s.epsilon));
}

TEST_CASE("pure radial flow map") {
  CHECK(radial_flow_map(0, Vec3(1, 2, 3)) == Vec3(1, 2, 3));
  CHECK(std::abs(radial_flow_map(1.5, Vec3(0, 1, 0)).norm() - 2) < 1e-15);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ur(0.2, 5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = ur(rng) * random_unit(rng);
    CHECK((radial_flow_map(1, radial_flow_map(1, x)) - radial_flow_map(2, x)).norm() < 1e-10);
  }
  CHECK_THROWS_AS(radial_flow_map(1, Vec3::Zero()), Error);
  CHECK_THROWS_AS(radial_flow_map(-1, Vec3::UnitX()), Error);
}

TEST_CASE("cutoff flow map against direct ODE integration") {
  const CutoffSpec s{2, 0.05};
  const auto f = VectorFieldSpec::radial(s);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ur(1, 6);
  for (int i = 0; i < 40; ++i) {
    const Vec3 x = ur(rng) * random_unit(rng);
    const double t = 0.3 + 0.05 * i;
    const Vec3 a = radial_flow_map(t, x, s);
    CHECK((a - integrate_field(f, x, t, 4000)).norm() < 1e-8);
    CHECK((radial_flow_map(0.4, radial_flow_map(t, x, s), s) - radial_flow_map(t + 0.4, x, s)).norm() < 1e-8);
    if (x.norm() <= s.rho) CHECK(a == x);
  }
  CHECK(radial_flow_map(1, Vec3::Zero(), s) == Vec3::Zero());
}

TEST_CASE("flow jacobian") {
  CHECK(flow_jacobian(0, Vec3(1, 2, 0), Vec3::UnitZ()).gaussian == 1.0);
  CHECK(std::abs(flow_jacobian(1.5, Vec3(1, 0, 0), Vec3(1, 0, 0)).gaussian - 4 * std::exp(-0.75)) < 1e-10);
  CHECK_THROWS_AS(flow_jacobian(1, Vec3::Zero(), Vec3::UnitZ()), Error);

  // Area distortion of a small triangle by central differences.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ur(0.3, 9), ut(0.01, 2);
  const CutoffSpec s{3, 0.05};
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = ur(rng) * random_unit(rng), n = random_unit(rng);
    const double t = ut(rng);
    const Vec3 e1 = n.unitOrthogonal(), e2 = n.cross(e1);
    for (bool cut : {false, true}) {
      std::optional<CutoffSpec> sp;
      if (cut) sp = s;
      const double h = 1e-5;
      const Vec3 d1 = (radial_flow_map(t, x + h * e1, sp) - radial_flow_map(t, x - h * e1, sp)) / (2 * h);
      const Vec3 d2 = (radial_flow_map(t, x + h * e2, sp) - radial_flow_map(t, x - h * e2, sp)) / (2 * h);
      const double fd = d1.cross(d2).norm();
      const FlowJacobian j = flow_jacobian(t, x, n, sp);
      CHECK(std::abs(fd - j.euclidean) < 1e-5 * j.euclidean);
      const double fx = radial_flow_map(t, x, sp).squaredNorm();
      CHECK(std::abs(j.gaussian - j.euclidean * std::exp(-(fx - x.squaredNorm()) / 4)) < 1e-12 * j.euclidean);
    }
  }
}

TEST_CASE("pushforward area") {
  const CutoffSpec s4{4, 0.05};
  auto s2 = sphere(2, 4);
  const double F2 = gaussian_area(s2).value;
  for (double t : {0.0, 0.5, 1.0}) {
    auto p = pushforward_area(s2, t, s4);
    CHECK(p.jacobian_path == doctest::Approx(F2).epsilon(1e-14));
    CHECK(p.mesh_path == doctest::Approx(F2).epsilon(1e-14));
  }
  auto s20 = sphere(20, 6);
  const double F20 = gaussian_area(s20).value;
  auto p0 = pushforward_area(s20, 0, s4);
  CHECK(p0.jacobian_path == doctest::Approx(F20).epsilon(1e-12));
  auto p1 = pushforward_area(s20, 1, s4);
  CHECK(std::abs(p1.jacobian_path - p1.mesh_path) < 1e-4 * p1.mesh_path);
  CHECK(p1.jacobian_path < F20);
  CHECK(p1.mesh_path < F20);
  // The whole sphere sits where phi = 1: exact factor (1 + 2t/r^2) e^{-t/2}.
  CHECK(std::abs(p1.jacobian_path / F20 - (1 + 2.0 / 400) * std::exp(-0.5)) < 1e-4);
}

TEST_CASE("pushforward paths converge together on a mixed fixture") {
  PrimitiveParams pe;
  pe.semi_axes = Vec3(6, 5, 4);
  const CutoffSpec s{2, 0.05};
  for (double t : {0.1, 0.5, 1.0}) {
    double prev = 1e9;
    for (int r = 3; r <= 4; ++r) {
      auto p = pushforward_area(generate_primitive(PrimitiveKind::Ellipsoid, pe, r), t, s);
      const double rel = std::abs(p.jacobian_path - p.mesh_path) / p.mesh_path;
      CHECK(rel < prev / 3);
      prev = rel;
    }
    CHECK(prev < 2e-3);
  }
}

TEST_CASE("radial first variation") {
  const CutoffSpec s4{4, 0.05};
  CHECK(radial_first_variation(sphere(2, 4), s4) == 0.0);

  auto s20 = sphere(20, 6);
  const double F = gaussian_area(s20).value;
  CHECK(std::abs(radial_first_variation(s20, s4) - (2.0 / 400 - 0.5) * F) < 1e-6 * F);

  // Against the t-derivative of the pushforward (second-order one-sided).
  PrimitiveParams pe;
  pe.semi_axes = Vec3(6, 5, 4);
  PrimitiveParams pt;
  pt.major_radius = 5;
  pt.minor_radius = 2;
  PrimitiveParams pc;
  pc.radius = std::sqrt(2.0);
  pc.half_length = 8;
  struct Case {
    TriMesh m;
    CutoffSpec s;
  };
  std::vector<Case> cases = {{generate_primitive(PrimitiveKind::Ellipsoid, pe, 3), {2, 0.05}},
                             {generate_primitive(PrimitiveKind::Torus, pt, 3), {2.5, 0.05}},
                             {generate_primitive(PrimitiveKind::Cylinder, pc, 3), {1.5, 0.05}},
                             {sphere(20, 4), s4}};
  for (const auto& c : cases) {
    const double h = 1e-4;
    const double a0 = pushforward_area(c.m, 0, c.s).jacobian_path;
    const double a1 = pushforward_area(c.m, h, c.s).jacobian_path;
    const double a2 = pushforward_area(c.m, 2 * h, c.s).jacobian_path;
    const double fd = (-3 * a0 + 4 * a1 - a2) / (2 * h);
    const double v = radial_first_variation(c.m, c.s);
    CHECK(std::abs(v - fd) < 1e-3 * std::abs(fd));
    // Same integrand through the generic field jacobian.
    const double pw = first_variation(c.m, VectorFieldSpec::radial(c.s), {}, VariationMode::Pointwise);
    CHECK(std::abs(v - pw) < 1e-9 * std::abs(v));
  }
}

TEST_CASE("far mass dominates the radial first variation") {
  const CutoffSpec s{4, 0.05};
  auto m = merge_meshes({sphere(2, 3), sphere(9, 4)});
  const double far = mass_near_infinity(m, 8);
  const double ann = mass_in_annulus(m, 4, 8);
  REQUIRE(far > 0);
  CHECK(ann <= far / 100);
  CHECK(radial_first_variation(m, s) <= -far / 8);
}

TEST_CASE("stereographic lift lands on the unit sphere") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = (0.1 + i) * random_unit(rng);
    CHECK(std::abs(stereographic_lift(x).norm() - 1) < 1e-14);
  }
}
