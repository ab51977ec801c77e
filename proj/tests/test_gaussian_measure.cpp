#include <doctest.h>

#include <cmath>

#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/parallel.hpp"
#include "shrinker/primitives.hpp"

using namespace shrinker;

namespace {

const double kE = std::exp(1.0);

TriMesh sphere(double R, int ref, Vec3 c = Vec3::Zero()) {
  PrimitiveParams p;
  p.radius = R;
  p.center = c;
  return generate_primitive(PrimitiveKind::Sphere, p, ref);
}

TriMesh cylinder(int ref) {
  PrimitiveParams p;
  p.radius = std::sqrt(2.0);
  p.half_length = 8;
  return generate_primitive(PrimitiveKind::Cylinder, p, ref);
}

TriMesh plane(double offset, int ref, double R = 12) {
  PrimitiveParams p;
  p.radius = R;
  p.offset = offset;
  return generate_primitive(PrimitiveKind::PlaneDisk, p, ref);
}

void perp_pair(const Vec3& n, Vec3& a, Vec3& b) {
  a = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
  b = n.cross(a);
}

// Composite Simpson on [lo, hi] with an even number of intervals.
template <class F>
double simpson(F f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(lo + i * h);
  return s * h / 3;
}

// Brute-force polar integral of the density over the plane tail.
double plane_tail_oracle(const PlaneTail& t, const Vec3& x0, double t0) {
  Vec3 a, b;
  perp_pair(t.normal, a, b);
  const int nth = 720;
  return simpson(
      [&](double r) {
        double s = 0;
        for (int k = 0; k < nth; ++k) {
          const double th = 2 * M_PI * k / nth;
          const Vec3 y = t.center + r * (std::cos(th) * a + std::sin(th) * b);
          s += std::exp(-(y - x0).squaredNorm() / (4 * t0));
        }
        return r * s * 2 * M_PI / nth / (4 * M_PI * t0);
      },
      t.radius, t.radius + 40 * std::sqrt(t0) + (x0 - t.center).norm(), 4000);
}

double cylinder_tail_oracle(const CylinderTail& t, const Vec3& x0, double t0) {
  Vec3 a, b;
  perp_pair(t.axis, a, b);
  const int nth = 720;
  auto ring = [&](double z) {
    double s = 0;
    for (int k = 0; k < nth; ++k) {
      const double th = 2 * M_PI * k / nth;
      const Vec3 y = t.center + z * t.axis + t.radius * (std::cos(th) * a + std::sin(th) * b);
      s += std::exp(-(y - x0).squaredNorm() / (4 * t0));
    }
    return t.radius * s * 2 * M_PI / nth / (4 * M_PI * t0);
  };
  const double L = t.half_length + 40 * std::sqrt(t0) + (x0 - t.center).norm();
  return simpson(ring, t.half_length, L, 4000) + simpson(ring, -L, -t.half_length, 4000);
}

// P(|N(0, 2 I_3)| <= R) = P(chi2_3 <= R^2 / 2).
double chi3_cdf_ball(double R) {
  const double x = R * R / 2;
  return std::erf(std::sqrt(x / 2)) - std::sqrt(2 * x / M_PI) * std::exp(-x / 2);
}

}  // namespace

TEST_CASE("gaussian area of the model shrinkers") {
  CHECK(std::abs(gaussian_area(sphere(2, 5)).value - 4 / kE) < 1e-4);
  auto pl = gaussian_area(plane(0, 3));
  CHECK(std::abs(pl.value - 1.0) < 1e-6);
  CHECK(pl.tail_correction > 0);
  CHECK(std::abs(gaussian_area(cylinder(3)).value - std::sqrt(2 * M_PI / kE)) < 1e-3);
  // Offset plane: e^{-d^2/4}.
  CHECK(std::abs(gaussian_area(plane(1.5, 3)).value - std::exp(-1.5 * 1.5 / 4)) < 1e-6);
}

TEST_CASE("sphere area matches R^2 exp(-R^2/4) across radii") {
  for (double R : {0.5, 1.0, 3.0, 5.0}) {
    INFO("R = ", R);
    const double exact = R * R * std::exp(-R * R / 4);
    CHECK(std::abs(gaussian_area(sphere(R, 5)).value - exact) < 3e-3 * exact);  // polyhedral inscribed-sphere error
  }
}

TEST_CASE("plane tail closed form against brute-force polar quadrature") {
  PlaneTail t{Vec3(0.3, -0.2, 0.7), Vec3(1, 2, 2).normalized(), 3.0};
  struct P {
    Vec3 x0;
    double t0;
  };
  for (const P& p : {P{Vec3::Zero(), 1.0}, P{Vec3(1, 0.5, -2), 0.5}, P{Vec3(-2, 1, 0), 3.0}}) {
    const double exact = plane_tail_oracle(t, p.x0, p.t0);
    CHECK(std::abs(tail_density(t, p.x0, p.t0) - exact) < 1e-9 + 1e-7 * exact);
  }
}

TEST_CASE("cylinder tail closed form against brute-force quadrature") {
  CylinderTail t{Vec3(0, 0.2, 0.1), Vec3(0, 0.6, 0.8), std::sqrt(2.0), 3.0};
  struct P {
    Vec3 x0;
    double t0;
  };
  for (const P& p : {P{Vec3::Zero(), 1.0}, P{Vec3(0.5, 0.5, 1), 2.0}, P{Vec3(1, -1, 0), 0.7}}) {
    const double exact = cylinder_tail_oracle(t, p.x0, p.t0);
    CHECK(std::abs(tail_density(t, p.x0, p.t0) - exact) < 1e-9 + 1e-7 * exact);
  }
}

TEST_CASE("tail restricted to |x - x0| > R against the oracle with a hole") {
  PlaneTail t{Vec3::Zero(), Vec3::UnitZ(), 2.0};
  // Plane through x0 = 0: e^{-R^2/4} beyond R >= radius.
  CHECK(std::abs(tail_density(t, Vec3::Zero(), 1.0, 5.0) - std::exp(-25.0 / 4)) < 1e-9);
  CHECK(std::abs(tail_density(t, Vec3::Zero(), 1.0, 1.0) - std::exp(-4.0 / 4)) < 1e-9);
}

TEST_CASE("f_density identities and closed forms") {
  auto s = sphere(2, 4);
  const double F = gaussian_area(s).value;
  CHECK(std::abs(f_density(s, {Vec3::Zero(), 1.0}) - F) <= 1e-12 * F);
  auto pl = plane(0.5, 3);
  const double Fp = gaussian_area(pl).value;
  CHECK(std::abs(f_density(pl, {Vec3::Zero(), 1.0}) - Fp) <= 1e-12 * Fp);

  const double v4 = f_density(s, {Vec3::Zero(), 4.0});
  CHECK(std::abs(v4 - std::exp(-0.25)) < 1e-3);
  CHECK(v4 <= F);
  CHECK_THROWS_AS(f_density(s, {Vec3::Zero(), 0.0}), Error);
}

TEST_CASE("translate_dilate") {
  auto s = sphere(2, 4);
  auto same = translate_dilate(s, Vec3::Zero(), 1.0);
  for (std::size_t i = 0; i < s.num_vertices(); ++i) CHECK(same.vertex(i) == s.vertex(i));
  CHECK(std::abs(gaussian_area(translate_dilate(s, Vec3::Zero(), 0.5)).value - std::exp(-0.25)) < 1e-3);
  CHECK_THROWS_AS(translate_dilate(s, Vec3::Zero(), 0.0), Error);
  CHECK_THROWS_AS(translate_dilate(s, Vec3::Zero(), -1.0), Error);
}

TEST_CASE("scaling identity on several meshes") {
  std::vector<TriMesh> meshes = {generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 3), cylinder(2),
                                 plane(0.7, 2), generate_primitive(PrimitiveKind::Torus, PrimitiveParams{}, 2)};
  struct TS {
    Vec3 t;
    double s;
  };
  for (const auto& m : meshes) {
    const double F = gaussian_area(m).value;
    for (const TS& ts : {TS{Vec3(0.3, -0.1, 0.4), 1.7}, TS{Vec3(1, 1, 0), 0.6}, TS{Vec3(-0.5, 0, 2), 3.0}}) {
      const double lhs = gaussian_area(translate_dilate(m, ts.t, ts.s)).value;
      const double rhs = f_density(m, {ts.t, 1 / (ts.s * ts.s)});
      CHECK(std::abs(lhs - rhs) <= 1e-8 * F);
    }
    const double lhs = gaussian_area(translate_dilate(m, Vec3::Zero(), 2.5)).value;
    CHECK(std::abs(lhs - f_density(m, {Vec3::Zero(), 1 / 6.25})) <= 1e-8 * F);
  }
}

TEST_CASE("density gradient against central differences") {
  auto m = generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 3);
  auto cy = cylinder(2);
  for (const TriMesh* mp : {&m, &cy}) {
    DensityParams p{Vec3(0.3, -0.2, 0.5), 1.3};
    auto g = f_density_gradient(*mp, p);
    CHECK(std::abs(g.value - f_density(*mp, p)) < 1e-12);
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      DensityParams a = p, b = p;
      a.x0[k] += h;
      b.x0[k] -= h;
      CHECK(std::abs(g.d_x0[k] - (f_density(*mp, a) - f_density(*mp, b)) / (2 * h)) < 1e-6);
    }
    DensityParams a = p, b = p;
    a.t0 *= std::exp(h);
    b.t0 *= std::exp(-h);
    CHECK(std::abs(g.d_log_t0 - (f_density(*mp, a) - f_density(*mp, b)) / (2 * h)) < 1e-6);
  }
}

TEST_CASE("enclosed gaussian volume") {
  auto s = sphere(2, 5);
  auto v = gaussian_enclosed_volume(s, 1000000, 7);
  CHECK(std::abs(v.value - chi3_cdf_ball(2)) < 3 * v.standard_error);
  CHECK(v.standard_error < 1e-3);
  auto again = gaussian_enclosed_volume(s, 1000000, 7);
  CHECK(again.value == v.value);

  auto big = gaussian_enclosed_volume(sphere(50, 3), 200000, 1);
  CHECK(std::abs(big.value - 1.0) < 1e-6);
  auto far = gaussian_enclosed_volume(sphere(0.5, 3, Vec3(20, 0, 0)), 200000, 1);
  CHECK(far.value <= 3 * far.standard_error);

  CHECK_THROWS_AS(gaussian_enclosed_volume(cylinder(1), 1000, 1), Error);
}

TEST_CASE("enclosed volume is independent of the thread count") {
  auto s = sphere(1.5, 3, Vec3(0.2, 0, 0));
  const int saved = thread_count();
  set_thread_count(1);
  auto a = gaussian_enclosed_volume(s, 100000, 3);
  const double fa = gaussian_area(s).value;
  set_thread_count(4);
  auto b = gaussian_enclosed_volume(s, 100000, 3);
  const double fb = gaussian_area(s).value;
  set_thread_count(saved);
  CHECK(a.value == b.value);
  CHECK(fa == fb);
}

TEST_CASE("isoperimetric profile") {
  CHECK(isoperimetric_profile(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(isoperimetric_profile(0.0) == 0.0);
  CHECK(isoperimetric_profile(1.0) == 0.0);
  CHECK(std::abs(isoperimetric_profile(halfspace_volume(2.0)) - std::exp(-1.0)) < 1e-10);
  // Halfspace volume against the 1D integral directly.
  const double d = 0.8;
  const double direct = simpson([](double z) { return std::exp(-z * z / 4) / std::sqrt(4 * M_PI); }, d, 40, 20000);
  CHECK(std::abs(halfspace_volume(d) - direct) < 1e-12);
  for (double dd : {-3.0, -1.0, 0.3, 2.5}) CHECK(std::abs(isoperimetric_profile(halfspace_volume(dd)) - std::exp(-dd * dd / 4)) < 1e-10);
}

TEST_CASE("isoperimetric floor on closed meshes") {
  std::vector<TriMesh> meshes = {sphere(1, 4), sphere(2, 4), sphere(3.5, 4), sphere(2, 4, Vec3(1, 0.5, 0)),
                                 generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 4),
                                 generate_primitive(PrimitiveKind::Torus, PrimitiveParams{}, 3)};
  for (const auto& m : meshes) {
    auto v = gaussian_enclosed_volume(m, 400000, 11);
    const double lo = isoperimetric_profile(std::min(1.0, v.value + 3 * v.standard_error));
    const double hi = isoperimetric_profile(std::max(0.0, v.value - 3 * v.standard_error));
    CHECK(gaussian_area(m).value >= std::min(lo, hi) - 1e-4);
  }
}

TEST_CASE("volume growth") {
  auto s = sphere(2, 4);
  auto rec = volume_growth_check(s, {3.0});
  CHECK(rec[0].euclidean_mass == doctest::Approx(s.euclidean_area()).epsilon(1e-10));
  CHECK(std::abs(rec[0].euclidean_mass - 16 * M_PI) < 0.1);
  const double F = gaussian_area(s).value;
  CHECK(rec[0].bound == doctest::Approx(std::exp(0.25) * 4 * M_PI * F * 9).epsilon(1e-12));
  CHECK(rec[0].pass);

  rec = volume_growth_check(plane(0, 3), {1.0});
  CHECK(std::abs(rec[0].euclidean_mass - M_PI) < 1e-9);
  CHECK(std::abs(rec[0].bound - std::exp(0.25) * 4 * M_PI) < 1e-5);
  CHECK(rec[0].pass);

  rec = volume_growth_check(cylinder(2), {5.0});
  CHECK(rec[0].pass);
}

TEST_CASE("euclidean area in a ball is exact on a flat disk") {
  auto pl = plane(0, 2);
  for (double h : {0.0, 0.5, 1.3}) {
    const double r = 2.7;
    CHECK(std::abs(euclidean_area_in_ball(pl, Vec3(0.4, -0.3, h), r) - M_PI * (r * r - h * h)) < 1e-9);
  }
}

TEST_CASE("mass near infinity") {
  CHECK(mass_near_infinity(sphere(2, 3), 10) == 0.0);
  auto cy = cylinder(3);
  const double oracle = std::sqrt(2 * M_PI / kE) * std::erfc(std::sqrt(14.0) / 2);
  CHECK(std::abs(mass_near_infinity(cy, 4) - oracle) < 1e-3 * oracle);
  CHECK(mass_near_infinity(cy, 0) == doctest::Approx(gaussian_area(cy).value).epsilon(1e-12));
  auto e = generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 3);
  CHECK(mass_near_infinity(e, 0) == doctest::Approx(gaussian_area(e).value).epsilon(1e-12));

  for (const TriMesh* m : {&cy, &e}) {
    double prev = mass_near_infinity(*m, 0);
    for (double R = 0.5; R <= 30; R += 2.5) {
      const double v = mass_near_infinity(*m, R);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    CHECK(prev < 1e-12);
  }
  const double ann = mass_in_annulus(cy, 2, 5);
  CHECK(std::abs(ann - (mass_near_infinity(cy, 2) - mass_near_infinity(cy, 5))) < 1e-9);
}

TEST_CASE("quadrature consistency between rule orders") {
  std::vector<TriMesh> meshes = {sphere(2, 3), cylinder(2), plane(0.4, 2),
                                 generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 3)};
  for (const auto& m : meshes) {
    QuadratureSpec q3;
    q3.base_order = 3;
    auto a3 = gaussian_area(m, q3);
    auto a7 = gaussian_area(m);
    CHECK(std::abs(a7.value - a3.value) <= a3.error_estimate);
    CHECK(a7.error_estimate >= 0);
  }
  QuadratureSpec bad;
  bad.base_order = 5;
  CHECK_THROWS_AS(gaussian_area(sphere(2, 1), bad), Error);
}

TEST_CASE("nearest plane") {
  auto p = nearest_plane(plane(1.0, 3));
  CHECK(std::abs(std::abs(p.normal.z()) - 1) < 1e-12);
  CHECK(std::abs(p.offset - 1.0) < 1e-9);
  CHECK(p.distance_proxy < 1e-6);

  CHECK(nearest_plane(sphere(2, 4)).distance_proxy > 0.3);

  // Blow-up of the ellipsoid at a surface point approaches its tangent plane.
  auto e = generate_primitive(PrimitiveKind::Ellipsoid, PrimitiveParams{}, 4);
  const Face& f = e.face(123);
  const Vec3 t = (e.vertex(f[0]) + e.vertex(f[1]) + e.vertex(f[2])) / 3;
  auto blow = translate_dilate(e, t, 1e3);
  auto fit = nearest_plane(blow, {}, 5.0);
  CHECK(fit.distance_proxy < 0.05);
  CHECK(std::acos(std::min(1.0, std::abs(fit.normal.dot(e.face_normal(123))))) < 5 * M_PI / 180);
}
