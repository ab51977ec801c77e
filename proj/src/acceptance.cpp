#include "shrinker/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "shrinker/entropy.hpp"
#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/radial_flow.hpp"
#include "shrinker/report.hpp"
#include "shrinker/sweepout.hpp"
#include "shrinker/tightening.hpp"
#include "shrinker/topology.hpp"
#include "shrinker/variation.hpp"

namespace shrinker {

namespace {

const double kE = std::exp(1.0);
const double kFourOverE = 4 / kE;

// Collects named checks; the first failure is kept for the detail line.
struct Checks {
  bool ok = true;
  std::string first_failure;
  std::ostringstream values;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
  void note(const std::string& key, double v) { values << key << "=" << fmt9(v) << " "; }
  void note(const std::string& key, const std::string& v) { values << key << "=" << v << " "; }
};

TriMesh sphere(double R, int ref, const Vec3& c = Vec3::Zero()) {
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

TriMesh plane(int ref, double R = 12) {
  PrimitiveParams p;
  p.radius = R;
  return generate_primitive(PrimitiveKind::PlaneDisk, p, ref);
}

TriMesh ellipsoid(int ref, const Vec3& axes = Vec3(2.2, 2.0, 1.8)) {
  PrimitiveParams p;
  p.semi_axes = axes;
  return generate_primitive(PrimitiveKind::Ellipsoid, p, ref);
}

TriMesh perturbed(double eps, int ref, int degree = 4) {
  PrimitiveParams p;
  p.epsilon = eps;
  p.harmonic_degree = degree;
  return generate_primitive(PrimitiveKind::PerturbedSphere, p, ref);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return Vec3(nd(rng), nd(rng), nd(rng)).normalized();
}

void c1_model_areas(Checks& c) {
  const double fs = gaussian_area(sphere(2, 5)).value;
  const double fp = gaussian_area(plane(3)).value;
  const double fc = gaussian_area(cylinder(3)).value;
  c.note("plane", fp);
  c.note("sphere", fs);
  c.note("cylinder", fc);
  c.expect(std::abs(fp - 1) < 1e-6, "plane F");
  c.expect(std::abs(fs - kFourOverE) < 1e-4, "sphere F");
  c.expect(std::abs(fc - std::sqrt(2 * M_PI / kE)) < 1e-3, "cylinder F");
}

void c2_entropy(Checks& c) {
  double worst = 0, worst_t = 0;
  for (double R : {1.0, 2.0, 5.0}) {
    const EntropyResult e = entropy(sphere(R, 4));
    worst = std::max(worst, std::abs(e.lambda - kFourOverE));
    worst_t = std::max(worst_t, std::abs(e.argmax.t0 - R * R / 4) / (R * R / 4));
  }
  c.note("lambda_err", worst);
  c.note("t0_rel_err", worst_t);
  c.expect(worst < 1e-3, "sphere lambda");
  c.expect(worst_t < 1e-2, "argmax t0");

  const TriMesh m = ellipsoid(3);
  const double base = entropy(m).lambda;
  double drift = 0;
  for (const Vec3& t : {Vec3(0, 0, 0), Vec3(1, -0.5, 0.3)})
    for (double s : {0.4, 1.0, 2.5}) {
      if (t.isZero() && s == 1) continue;
      drift = std::max(drift, std::abs(entropy(translate_dilate(m, t, s)).lambda - base));
    }
  c.note("invariance_drift", drift);
  c.expect(drift < 2e-3, "translate_dilate invariance");
}

void c3_fixtures(Checks& c) {
  const std::vector<TriMesh> fx = {ellipsoid(3), ellipsoid(3, Vec3(2.5, 2.0, 1.5)), ellipsoid(3, Vec3(3, 2, 2)),
                                   perturbed(0.1, 3), perturbed(0.15, 3, 3)};
  double lo = INFINITY;
  for (const auto& m : fx) lo = std::min(lo, entropy(m).lambda);
  c.note("min_lambda", lo);
  c.expect(lo >= kFourOverE - 1e-3, "fixture entropy floor");

  const TriMesh m = fx[0];
  const double lambda = entropy(m).lambda;
  const auto fam = SweepoutFamily::canonical(m, 0.05);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-4, 4), utau(0, 1);
  double worst = -INFINITY;
  for (int i = 0; i < 200; ++i) worst = std::max(worst, fam.area(Vec3(ut(rng), ut(rng), ut(rng)), utau(rng)) - lambda);
  const WidthReport w = width_upper_bound(fam);
  worst = std::max(worst, w.max_area - lambda);
  c.note("slice_minus_lambda", worst);
  c.expect(worst <= 1e-6, "canonical slices dominated by entropy");
}

void c4_center(Checks& c) {
  const TriMesh s = sphere(2, 3);
  const CenterCheck cs = shrinker_center_check(s);
  CenterGrid g;
  g.tolerance = 3e-3;
  const CenterCheck cc = shrinker_center_check(cylinder(2), g);
  c.note("sphere_gap", cs.grid_max - cs.value_at_origin);
  c.note("cylinder_gap", cc.grid_max - cc.value_at_origin);
  c.expect(cs.pass, "sphere center check");
  c.expect(cc.pass, "cylinder center check");

  std::vector<double> ss;
  for (int i = 1; i <= 20; ++i) ss.push_back(0.1 * i);
  double worst = -INFINITY;
  for (const TriMesh& m : {sphere(2, 4), cylinder(2)})
    for (const Vec3& y : {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 0.5, 0.2)})
      for (double a : {0.0, 0.5, 1.0}) {
        const DilationReport r = dilation_monotonicity(m, y, a, ss);
        for (const auto& d : r.samples) worst = std::max(worst, d.dg_fd);
      }
  c.note("max_dg", worst);
  c.expect(worst <= 2e-3, "dilation monotonicity");
}

void c5_growth(Checks& c) {
  const std::vector<double> radii = {0.5, 1, 2, 3, 5};
  double worst = 0;
  for (const TriMesh& m : {plane(3), sphere(2, 4), cylinder(3)}) {
    for (const auto& r : volume_growth_check(m, radii)) {
      worst = std::max(worst, r.euclidean_mass / r.bound);
      c.expect(r.pass, "volume growth");
    }
  }
  c.note("max_mass_over_bound", worst);
}

void c6_jacobian(Checks& c) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ur(0.3, 9), ut(0.01, 2);
  const CutoffSpec spec{3, 0.05};
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = ur(rng) * random_unit(rng), n = random_unit(rng);
    const double t = ut(rng);
    const Vec3 e1 = n.unitOrthogonal(), e2 = n.cross(e1);
    for (bool cut : {false, true}) {
      std::optional<CutoffSpec> sp;
      if (cut) sp = spec;
      const double h = 1e-5;
      const Vec3 d1 = (radial_flow_map(t, x + h * e1, sp) - radial_flow_map(t, x - h * e1, sp)) / (2 * h);
      const Vec3 d2 = (radial_flow_map(t, x + h * e2, sp) - radial_flow_map(t, x - h * e2, sp)) / (2 * h);
      const double j = flow_jacobian(t, x, n, sp).euclidean;
      worst = std::max(worst, std::abs(d1.cross(d2).norm() - j) / j);
    }
  }
  const double spot = flow_jacobian(1.5, Vec3(1, 0, 0), Vec3(1, 0, 0)).gaussian;
  c.note("fd_rel_err", worst);
  c.note("spot", spot);
  c.expect(worst < 1e-5, "finite-difference jacobian");
  c.expect(std::abs(spot - 4 * std::exp(-0.75)) < 1e-10, "closed-form spot value");
}

void c7_radial(Checks& c) {
  const CutoffSpec s4{4, 0.05};
  const double c1 = radial_field(s4).c1_norm;
  c.note("c1_norm", c1);
  c.expect(c1 <= 1, "c1 norm");

  std::mt19937_64 rng(5);
  double inside = 0, far = 0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 n = random_unit(rng);
    inside = std::max(inside, std::abs(gaussian_divergence(s4, 3.9 * random_unit(rng), n)));
    far = std::max(far, std::abs(gaussian_divergence(s4, 1e6 * random_unit(rng), n) + 0.5));
  }
  c.note("div_far_err", far);
  c.expect(inside == 0, "divergence vanishes inside rho");
  c.expect(far <= 1e-6, "divergence limit");

  PrimitiveParams pe;
  pe.semi_axes = Vec3(6, 5, 4);
  PrimitiveParams pt;
  pt.major_radius = 5;
  pt.minor_radius = 2;
  struct Case {
    TriMesh m;
    CutoffSpec s;
  };
  const std::vector<Case> cases = {{generate_primitive(PrimitiveKind::Ellipsoid, pe, 3), {2, 0.05}},
                                   {generate_primitive(PrimitiveKind::Torus, pt, 3), {2.5, 0.05}},
                                   {cylinder(3), {1.5, 0.05}},
                                   {sphere(20, 4), s4}};
  double worst = 0;
  for (const auto& k : cases) {
    const double h = 1e-4;
    const double a0 = pushforward_area(k.m, 0, k.s).jacobian_path;
    const double a1 = pushforward_area(k.m, h, k.s).jacobian_path;
    const double a2 = pushforward_area(k.m, 2 * h, k.s).jacobian_path;
    const double fd = (-3 * a0 + 4 * a1 - a2) / (2 * h);
    worst = std::max(worst, std::abs(radial_first_variation(k.m, k.s) - fd) / std::abs(fd));
  }
  c.note("fv_vs_fd_rel", worst);
  c.expect(worst < 1e-3, "first variation vs pushforward derivative");
}

void c8_tighten(Checks& c) {
  const TriMesh far = sphere(20, 4);
  const DescentField d = select_descent_field(far);
  const double fv = first_variation(far, d.field, {}, VariationMode::Pointwise);
  c.note("far_mass", d.far_mass);
  c.note("radial_fv", fv);
  c.expect(d.which == DescentCase::RadialField, "radial case fires");
  c.expect(fv <= -d.far_mass / 8, "decrement certificate");

  // 200 steps with the gate off; the far sphere keeps taking radial steps.
  TightenOptions off;
  off.gate = 0;
  const TightenResult r = tighten(sphere(20, 3), 200, off);
  int rises = 0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) rises += r.trace[i].area > r.trace[i - 1].area;
  c.note("far_steps", static_cast<double>(r.trace.size() - 1));
  c.expect(r.trace.size() == 201 && rises == 0, "far-sphere trace nonincreasing over 200 steps");

  const TightenResult p = tighten(perturbed(0.1, 3), 200);
  for (std::size_t i = 1; i < p.trace.size(); ++i) rises += p.trace[i].area > p.trace[i - 1].area;
  c.note("perturbed_steps", static_cast<double>(p.trace.size() - 1));
  c.note("perturbed_gamma", p.final_gamma);
  c.expect(rises == 0, "perturbed trace nonincreasing");

  double drift = 0;
  for (const auto& member : ShrinkerLibrary::standard().members) {
    const TriMesh m = library_mesh(member, 3);
    const TightenResult t = tighten(m, 10);
    for (std::size_t i = 0; i < m.num_vertices(); ++i) drift = std::max(drift, (t.mesh.vertex(i) - m.vertex(i)).norm());
  }
  c.note("library_drift", drift);
  c.expect(drift < 1e-6, "library fixed points");
}

void c9_spectrum(Checks& c) {
  const TriMesh m = sphere(2, 4);
  const StabilitySpectrum s = stability_spectrum(m, 9);
  const double exact[9] = {1, 0.5, 0.5, 0.5, -0.5, -0.5, -0.5, -0.5, -0.5};
  double worst = 0;
  for (int i = 0; i < 9; ++i) worst = std::max(worst, std::abs(s.eigenvalues[i] - exact[i]));
  const int index = morse_index(s);
  const StabilityMatrices sm = assemble_stability(m);
  double asym = 0;
  for (const auto* A : {&sm.stiffness, &sm.potential, &sm.mass}) {
    const Eigen::SparseMatrix<double> At = A->transpose();
    asym = std::max(asym, (*A - At).norm() / A->norm());
  }
  c.note("eig_err", worst);
  c.note("index", index);
  c.note("asymmetry", asym);
  c.expect(worst < 5e-2, "eigenvalues");
  c.expect(index == 4, "morse index");
  c.expect(asym <= 1e-12, "symmetry");
}

void c10_residual(Checks& c) {
  struct Fixture {
    const char* name;
    std::function<TriMesh(int)> make;
    bool strict;
  };
  const std::vector<Fixture> fx = {{"sphere", [](int r) { return sphere(2, r); }, true},
                                   {"cylinder", [](int r) { return cylinder(r); }, true},
                                   {"plane", [](int r) { return plane(r); }, false}};
  for (const auto& f : fx) {
    const double a = shrinker_residual(f.make(2)).sup;
    const double b = shrinker_residual(f.make(3)).sup;
    const double d = shrinker_residual(f.make(4)).sup;
    c.note(std::string(f.name) + "_sup", d);
    c.expect(d < 5e-2, std::string(f.name) + " residual");
    c.expect(f.strict ? (b < a && d < b) : (b <= a && d <= b), std::string(f.name) + " monotone");
  }
}

void c11_plane_family(Checks& c) {
  const auto pf = SweepoutFamily::plane_family();
  const WidthReport w = width_upper_bound(pf);
  const IsoperimetricBound b = width_lower_bound_isoperimetric(pf);
  c.note("max", w.max_area);
  c.note("half_volume_slice", b.slice_area);
  c.expect(std::abs(w.max_area - 1) < 1e-6, "plane family max");
  c.expect(b.floor == 1 && std::abs(b.slice_area - 1) < 1e-6, "isoperimetric tightness");
}

void c12_sphere_family(Checks& c) {
  WidthGrid g;
  g.tau_points = 201;
  const auto sf = SweepoutFamily::sphere_family(4);
  const WidthReport w = width_upper_bound(sf, g);
  const double R = dilation_of(w.argmax_tau);
  const double dR = dilation_of(std::min(1.0, w.argmax_tau + w.tau_step)) - R;
  c.note("max", w.max_area);
  c.note("argmax_radius", R);
  c.expect(std::abs(w.max_area - kFourOverE) < 1e-3, "sphere family max");
  c.expect(std::abs(R - 2) <= std::abs(dR) + 1e-9, "argmax radius");

  const auto tf = SweepoutFamily::translated_sphere_family(50, 4);
  const WidthReport wt = width_upper_bound(tf, g);
  c.note("translated_max", wt.max_area);
  c.expect(wt.max_area <= 1 + 2e-2, "translated family");

  const IsoperimetricBound b = width_lower_bound_isoperimetric(sf);
  c.note("half_volume_slice", b.slice_area);
  c.expect(b.floor == 1 && b.slice_area >= b.floor - 5e-3, "isoperimetric floor");
}

void c13_degree(Checks& c) {
  std::ostringstream got;
  for (auto kind : {PrimitiveKind::Sphere, PrimitiveKind::Torus, PrimitiveKind::DoubleTorus}) {
    const TriMesh m = generate_primitive(kind, PrimitiveParams{}, 2);
    const GaussDegree d = gauss_degree(m);
    const int g = topology_report(m).total_genus();
    got << d.degree << "/" << 1 - g << ",";
    c.expect(d.degree == 1 - g && d.residual < 0.1, primitive_kind_name(kind) + " degree");
  }
  c.note("degree/expected", got.str());
}

void c14_collar(Checks& c) {
  const TriMesh m = ellipsoid(3);
  const auto fam = SweepoutFamily::canonical(m, 0.05);
  double off = 0, ang = 0;
  for (std::size_t f : {5u, 200u, 901u}) {
    const Face& fc = m.face(f);
    const Vec3 p0 = (m.vertex(fc[0]) + m.vertex(fc[1]) + m.vertex(fc[2])) / 3;
    const auto col = fam.collar(p0, 1.0);
    for (double C : {0.5, 1.0, 2.0}) {
      int n = 0;
      for (double a = 0.001; n < 5; a *= 1.6, ++n) {
        const Vec3 t = col.p - C * std::tan(M_PI * a / 2) * col.normal;
        if (fam.collar(t, 1 - a).radius >= fam.epsilon()) break;
        const Slice s = fam.slice(t, 1 - a);
        c.expect(s.kind == Slice::Kind::Plane, "collar gives planes");
        if (s.kind != Slice::Kind::Plane) continue;
        off = std::max(off, std::abs(s.offset - C));
        ang = std::max(ang, std::acos(std::min(1.0, s.normal.dot(col.normal))) * 180 / M_PI);
      }
      c.expect(n == 5, "five samples inside the collar");
    }
  }
  c.note("offset_err", off);
  c.note("angle_deg", ang);
  c.expect(off < 1e-2, "offsets");
  c.expect(ang < 5, "normals");
}

void c15_scaling(Checks& c) {
  PrimitiveParams pc;
  pc.radius = std::sqrt(2.0);
  pc.half_length = 8;
  const std::vector<TriMesh> fx = {ellipsoid(3), generate_primitive(PrimitiveKind::Cylinder, pc, 2),
                                   generate_primitive(PrimitiveKind::Torus, PrimitiveParams{}, 2)};
  const std::vector<Vec3> ts = {Vec3(0, 0, 0),    Vec3(0.3, -0.1, 0.4), Vec3(1, 1, 0),
                                Vec3(-0.5, 0, 2), Vec3(0, 0.7, -0.7),   Vec3(1.5, 0, 0),
                                Vec3(0, -1, 1),   Vec3(0.2, 0.2, 0.2),  Vec3(-1, -1, -0.5)};
  double worst = 0;
  int count = 0;
  for (const auto& m : fx) {
    const double F = gaussian_area(m).value;
    for (const Vec3& t : ts)
      for (double s : {0.6, 1.7, 3.0}) {
        const double lhs = gaussian_area(translate_dilate(m, t, s)).value;
        const double rhs = f_density(m, {t, 1 / (s * s)});
        worst = std::max(worst, std::abs(lhs - rhs) / F);
        ++count;
      }
  }
  c.note("max_rel_gap", worst);
  c.note("points", count);
  c.expect(count == 81 && worst <= 1e-8, "scaling identity");
}

using Runner = void (*)(Checks&);
const Runner kRunners[] = {c1_model_areas,    c2_entropy,       c3_fixtures,       c4_center,   c5_growth,
                           c6_jacobian, c7_radial,        c8_tighten,        c9_spectrum, c10_residual,
                           c11_plane_family, c12_sphere_family, c13_degree, c14_collar,  c15_scaling};

constexpr double kBudgetSeconds = 30 * 60;

}  // namespace

const std::vector<std::pair<int, std::string>>& acceptance_criteria() {
  static const std::vector<std::pair<int, std::string>> list = {
      {1, "model shrinker areas"},
      {2, "entropy of spheres and invariance"},
      {3, "entropy floor on fixtures and slice domination"},
      {4, "center check and dilation monotonicity"},
      {5, "euclidean volume growth"},
      {6, "flow jacobian"},
      {7, "radial field, divergence, first variation"},
      {8, "decrement certificate and tighten trace"},
      {9, "sphere stability spectrum"},
      {10, "shrinker residuals"},
      {11, "plane family width"},
      {12, "sphere families width"},
      {13, "gauss map degree"},
      {14, "collar limits"},
      {15, "scaling identity"},
      {16, "end-to-end verify"},
  };
  return list;
}

CriterionResult run_criterion(int id) {
  if (id < 1 || id > 15) fail(ErrorCode::Parameter, "acceptance", "criterion id must be in 1..15 (16 aggregates)");
  CriterionResult r;
  r.id = id;
  r.title = acceptance_criteria()[id - 1].second;
  const auto t0 = std::chrono::steady_clock::now();
  Checks c;
  try {
    kRunners[id - 1](c);
  } catch (const Error& e) {
    c.expect(false, std::string(error_code_name(e.code())) + " in " + e.module() + ": " + e.what());
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = c.ok;
  r.detail = c.values.str();
  if (!r.detail.empty()) r.detail.pop_back();
  if (!c.ok) r.detail += (r.detail.empty() ? "" : "; ") + std::string("failed: ") + c.first_failure;
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& progress) {
  std::vector<int> want = ids;
  if (want.empty())
    for (int i = 1; i <= 16; ++i) want.push_back(i);
  for (int id : want)
    if (id < 1 || id > 16) fail(ErrorCode::Parameter, "acceptance", "unknown criterion " + std::to_string(id));
  const bool summary = std::find(want.begin(), want.end(), 16) != want.end();

  std::vector<CriterionResult> out;
  std::vector<bool> done(16, false);
  auto emit = [&](CriterionResult r) {
    if (progress) progress(r);
    out.push_back(std::move(r));
  };
  for (int id : want) {
    if (id == 16) continue;
    emit(run_criterion(id));
    done[id - 1] = true;
  }
  if (summary) {
    std::vector<CriterionResult> rest;
    for (int id = 1; id <= 15; ++id)
      if (!done[id - 1]) rest.push_back(run_criterion(id));
    CriterionResult s;
    s.id = 16;
    s.title = acceptance_criteria()[15].second;
    double total = 0;
    int passed = 0;
    for (const auto* v : {&out, &rest})
      for (const auto& r : *v) {
        total += r.seconds;
        passed += r.pass;
      }
    s.seconds = total;
    s.pass = passed == 15 && total < kBudgetSeconds;
    s.detail = "passed=" + std::to_string(passed) + "/15 total_seconds=" + fmt9(total);
    emit(s);
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.pass ? "PASS" : "FAIL");
  char secs[32];
  std::snprintf(secs, sizeof secs, "  [%.2f s]  ", r.seconds);
  return head + r.title + secs + r.detail;
}

}  // namespace shrinker
