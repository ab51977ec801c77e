#include <doctest.h>

#include <cmath>

#include "shrinker/entropy.hpp"
#include "shrinker/error.hpp"
#include "shrinker/primitives.hpp"

using namespace shrinker;

namespace {

const double kFourOverE = 4 / std::exp(1.0);

TriMesh sphere(double R, int ref, Vec3 c = Vec3::Zero()) {
  PrimitiveParams p;
  p.radius = R;
  p.center = c;
  return generate_primitive(PrimitiveKind::Sphere, p, ref);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("sphere entropy at every radius") {
  for (double R : {1.0, 2.0, 5.0}) {
    INFO("R = ", R);
    auto e = entropy(sphere(R, 4));
    CHECK(std::abs(e.lambda - kFourOverE) < 1e-3);
    CHECK(std::abs(e.argmax.t0 - R * R / 4) < 1e-2 * R * R / 4);
    CHECK(e.argmax.x0.norm() < 1e-2 * R);
    CHECK(e.starts_used == 5);
  }
}

TEST_CASE("plane entropy is one, attained on the plane") {
  for (double d : {0.0, 1.0, 3.0}) {
    PrimitiveParams p;
    p.radius = 12;
    p.offset = d;
    auto e = entropy(generate_primitive(PrimitiveKind::PlaneDisk, p, 3));
    CHECK(std::abs(e.lambda - 1.0) < 1e-4);
    CHECK(std::abs(e.argmax.x0.z() - d) < 1e-2 * std::sqrt(e.argmax.t0));
  }
}

TEST_CASE("ellipsoid entropy exceeds the round sphere value") {
  auto e = entropy(generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 4));
  CHECK(e.lambda >= kFourOverE - 1e-3);
}

TEST_CASE("entropy dominates gaussian area and the isoperimetric floor") {
  PrimitiveParams pc;
  pc.radius = std::sqrt(2.0);
  std::vector<TriMesh> meshes = {sphere(2, 3), sphere(1.2, 3, Vec3(0.5, 0, 0)),
                                 generate_primitive(PrimitiveKind::Torus, PrimitiveParams{}, 3),
                                 generate_primitive(PrimitiveKind::Cylinder, pc, 2)};
  for (const auto& m : meshes) {
    auto e = entropy(m);
    CHECK(e.lambda >= gaussian_area(m).value - 1e-6);
    CHECK(e.lambda >= 1 - 2e-3);
  }
}

TEST_CASE("entropy is invariant under translation and dilation") {
  const auto m = generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 3);
  const double base = entropy(m).lambda;
  struct TS {
    Vec3 t;
    double s;
  };
  for (const TS& ts : {TS{Vec3(1, -0.5, 0.3), 1.0}, TS{Vec3::Zero(), 0.4}, TS{Vec3(0.2, 0.2, -1), 2.5}}) {
    CHECK(std::abs(entropy(translate_dilate(m, ts.t, ts.s)).lambda - base) < 2e-3);
  }
  // A far-away sphere keeps its entropy although F itself underflows.
  auto far = sphere(2, 3, Vec3(60, 0, 0));
  CHECK(gaussian_area(far).value < 1e-300);
  CHECK(std::abs(entropy(far).lambda - entropy(sphere(2, 3)).lambda) < 2e-3);
}

TEST_CASE("entropy is deterministic") {
  auto m = generate_primitive(PrimitiveKind::PerturbedSphere, PrimitiveParams{}, 3);
  auto a = entropy(m), b = entropy(m);
  CHECK(a.lambda == b.lambda);
  CHECK(a.argmax.x0 == b.argmax.x0);
  CHECK(a.argmax.t0 == b.argmax.t0);
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("entropy errors") {
  CHECK(code_of([] { entropy(TriMesh({}, {})); }) == ErrorCode::Undefined);
  EntropyOptions o;
  o.starts = 0;
  CHECK(code_of([&] { entropy(sphere(2, 1), o); }) == ErrorCode::Parameter);
}

TEST_CASE("density probe agrees with adaptive quadrature") {
  auto m = sphere(2, 4);
  DensityProbe p(m, 7);
  for (double t0 : {0.5, 1.0, 3.0}) {
    DensityParams d{Vec3(0.3, 0.1, -0.2), t0};
    CHECK(std::abs(p(d) - f_density(m, d)) < 1e-6);
  }
}

TEST_CASE("shrinker center check") {
  auto c = shrinker_center_check(sphere(2, 3));
  CHECK(c.pass);
  CHECK(std::abs(c.grid_max - c.value_at_origin) < 1e-3);

  PrimitiveParams pc;
  pc.radius = std::sqrt(2.0);
  CenterGrid g;
  g.tolerance = 3e-3;
  CHECK(shrinker_center_check(generate_primitive(PrimitiveKind::Cylinder, pc, 2), g).pass);

  PrimitiveParams pe;
  pe.epsilon = 0.2;
  CHECK(code_of([&] { shrinker_center_check(generate_primitive(PrimitiveKind::PerturbedSphere, pe, 3)); }) ==
        ErrorCode::Precondition);
}

TEST_CASE("dilation monotonicity") {
  auto m = sphere(2, 4);
  std::vector<double> s;
  for (int i = 1; i <= 20; ++i) s.push_back(0.1 * i);
  auto r = dilation_monotonicity(m, Vec3::UnitX(), 0, s);
  CHECK(r.pass);
  for (const auto& d : r.samples) {
    CHECK(d.dg_fd <= 2e-3);
    CHECK(std::abs(d.dg_fd - d.dg_analytic) < 1e-6);
  }
  s.resize(15);
  r = dilation_monotonicity(m, Vec3::Zero(), 1, s);
  CHECK(r.pass);
  for (const auto& d : r.samples) CHECK(std::abs(d.dg_fd - d.dg_analytic) < 1e-6);

  r = dilation_monotonicity(m, Vec3::Zero(), 0, s);
  for (const auto& d : r.samples) {
    CHECK(std::abs(d.dg_fd) < 1e-6);
    CHECK(d.g == r.samples.front().g);
  }

  CHECK(code_of([&] { dilation_monotonicity(m, Vec3::Zero(), -1, {0.5, 1.5}); }) == ErrorCode::Parameter);
  PrimitiveParams pe;
  pe.epsilon = 0.2;
  CHECK(code_of([&] {
          dilation_monotonicity(generate_primitive(PrimitiveKind::PerturbedSphere, pe, 3), Vec3::UnitX(), 0, {1.0});
        }) == ErrorCode::Precondition);
}
