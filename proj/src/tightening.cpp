#include "shrinker/tightening.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "shrinker/differential.hpp"
#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/radial_flow.hpp"
#include "shrinker/variation.hpp"

namespace shrinker {

ShrinkerLibrary ShrinkerLibrary::standard() {
  ShrinkerLibrary lib;
  lib.members.push_back({LibraryMember::Kind::Plane, "plane", 0, 1.0});
  lib.members.push_back({LibraryMember::Kind::Sphere, "sphere", 2.0, 4 / std::exp(1.0)});
  lib.members.push_back(
      {LibraryMember::Kind::Cylinder, "cylinder", std::sqrt(2.0), std::sqrt(2 * M_PI / std::exp(1.0))});
  return lib;
}

TriMesh library_mesh(const LibraryMember& m, int refinement) {
  PrimitiveParams p;
  switch (m.kind) {
    case LibraryMember::Kind::Plane:
      p.radius = 10;
      return generate_primitive(PrimitiveKind::PlaneDisk, p, refinement);
    case LibraryMember::Kind::Sphere:
      p.radius = m.radius;
      return generate_primitive(PrimitiveKind::Sphere, p, refinement);
    case LibraryMember::Kind::Cylinder:
      p.radius = m.radius;
      return generate_primitive(PrimitiveKind::Cylinder, p, refinement);
  }
  return {};
}

namespace {

struct Node {
  Vec3 x, n;
  double w;
};

// Fixed 7-point nodes with interpolated vertex normals.
std::vector<Node> weighted_nodes(const TriMesh& mesh) {
  const DifferentialData d = differential_data(mesh);
  const TriangleRule& rule = triangle_rule(7);
  const GaussWeight w = GaussWeight::density(Vec3::Zero(), 1.0);
  std::vector<Node> out;
  out.reserve(mesh.num_faces() * rule.bary.size());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& fc = mesh.face(f);
    const double a = mesh.face_area(f);
    for (std::size_t k = 0; k < rule.bary.size(); ++k) {
      const Vec3& b = rule.bary[k];
      const Vec3 x = b[0] * mesh.vertex(fc[0]) + b[1] * mesh.vertex(fc[1]) + b[2] * mesh.vertex(fc[2]);
      Vec3 n = b[0] * d.normal[fc[0]] + b[1] * d.normal[fc[1]] + b[2] * d.normal[fc[2]];
      const double nn = n.norm();
      n = nn > 0 ? Vec3(n / nn) : mesh.face_normal(f);
      out.push_back({x, n, w(x) * a * rule.weight[k]});
    }
  }
  return out;
}

// Squared point and normal deviations from the cylinder of radius R about axis a.
void cylinder_terms(const std::vector<Node>& nodes, const Vec3& a, double R, double& p2, double& n2) {
  NeumaierSum sp, sn;
  for (const Node& q : nodes) {
    const Vec3 perp = q.x - q.x.dot(a) * a;
    const double r = perp.norm();
    sp.add(q.w * (r - R) * (r - R));
    const double c = r > 0 ? q.n.dot(perp) / r : 0.0;
    sn.add(q.w * (1 - c * c));
  }
  p2 = sp.value();
  n2 = sn.value();
}

Vec3 from_angles(double th, double ph) {
  return Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
}

MemberDistance distance_from_nodes(const std::vector<Node>& nodes, double W, double F, const LibraryMember& m) {
  MemberDistance out;
  out.area_gap = std::abs(F - m.area);
  if (!(W > 0)) {
    // All mesh weight underflows; the area is carried by the tail alone.
    return out;
  }
  switch (m.kind) {
    case LibraryMember::Kind::Plane: {
      // min over unit a of a^T (Mx - Mn) a / W + 1 = point^2 + normal^2.
      Eigen::Matrix3d Mx = Eigen::Matrix3d::Zero(), Mn = Eigen::Matrix3d::Zero();
      for (const Node& n : nodes) {
        Mx += n.w * n.x * n.x.transpose();
        Mn += n.w * n.n * n.n.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Mx - Mn);
      const Vec3 a = es.eigenvectors().col(0);
      out.direction = a;
      out.point_rms = std::sqrt(std::max(0.0, a.dot(Mx * a) / W));
      out.normal_rms = std::sqrt(std::max(0.0, 1 - a.dot(Mn * a) / W));
      break;
    }
    case LibraryMember::Kind::Sphere: {
      NeumaierSum sp, sn;
      for (const Node& n : nodes) {
        const double r = n.x.norm();
        sp.add(n.w * (r - m.radius) * (r - m.radius));
        const double c = r > 0 ? n.n.dot(n.x) / r : 0.0;
        sn.add(n.w * (1 - c * c));
      }
      out.point_rms = std::sqrt(std::max(0.0, sp.value() / W));
      out.normal_rms = std::sqrt(std::max(0.0, sn.value() / W));
      break;
    }
    case LibraryMember::Kind::Cylinder: {
      auto cost = [&](const Vec3& a) {
        double p2, n2;
        cylinder_terms(nodes, a, m.radius, p2, n2);
        return (p2 + n2) / W;
      };
      // Seeds: principal directions of positions and normals.
      Eigen::Matrix3d Mx = Eigen::Matrix3d::Zero(), Mn = Eigen::Matrix3d::Zero();
      for (const Node& n : nodes) {
        Mx += n.w * n.x * n.x.transpose();
        Mn += n.w * n.n * n.n.transpose();
      }
      std::vector<Vec3> seeds;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ex(Mx), en(Mn);
      for (int i = 0; i < 3; ++i) seeds.push_back(ex.eigenvectors().col(i));
      seeds.push_back(en.eigenvectors().col(0));
      Vec3 best = seeds[0];
      double bc = cost(best);
      for (const Vec3& s : seeds) {
        const double c = cost(s);
        if (c < bc) bc = c, best = s;
      }
      // Pattern search in spherical angles.
      double th = std::acos(std::clamp(best.z(), -1.0, 1.0)), ph = std::atan2(best.y(), best.x());
      for (double step = 0.1; step > 1e-4; step *= 0.5) {
        bool moved = true;
        while (moved) {
          moved = false;
          const double cand[4][2] = {{th + step, ph}, {th - step, ph}, {th, ph + step}, {th, ph - step}};
          for (const auto& c : cand) {
            const double v = cost(from_angles(c[0], c[1]));
            if (v < bc - 1e-15) {
              bc = v, th = c[0], ph = c[1];
              moved = true;
            }
          }
        }
      }
      out.direction = from_angles(th, ph);
      double p2, n2;
      cylinder_terms(nodes, out.direction, m.radius, p2, n2);
      out.point_rms = std::sqrt(std::max(0.0, p2 / W));
      out.normal_rms = std::sqrt(std::max(0.0, n2 / W));
      break;
    }
  }
  return out;
}

struct NodeSet {
  std::vector<Node> nodes;
  double W = 0, F = 0;
};

NodeSet node_set(const TriMesh& mesh, const QuadratureSpec& q) {
  NodeSet s;
  s.F = gaussian_area(mesh, q).value;
  if (!(s.F > 0)) fail(ErrorCode::Precondition, "tightening", "distance needs positive Gaussian area");
  s.nodes = weighted_nodes(mesh);
  NeumaierSum total;
  for (const Node& n : s.nodes) total.add(n.w);
  s.W = total.value();
  return s;
}

}  // namespace

MemberDistance member_distance(const TriMesh& mesh, const LibraryMember& m, const QuadratureSpec& q) {
  const NodeSet s = node_set(mesh, q);
  return distance_from_nodes(s.nodes, s.W, s.F, m);
}

StationarityGap stationarity_gap(const TriMesh& mesh, const ShrinkerLibrary& lib, const QuadratureSpec& q) {
  if (lib.members.empty()) fail(ErrorCode::Parameter, "tightening", "empty shrinker library");
  const NodeSet s = node_set(mesh, q);
  StationarityGap g;
  g.gamma = INFINITY;
  for (std::size_t i = 0; i < lib.members.size(); ++i) {
    g.distances.push_back(distance_from_nodes(s.nodes, s.W, s.F, lib.members[i]));
    const double d = g.distances.back().total();
    if (d < g.gamma) {
      g.gamma = d;
      g.nearest = static_cast<int>(i);
    }
  }
  g.nearest_name = lib.members[g.nearest].name;
  const double j = g.gamma > 0 ? std::ceil(-std::log2(g.gamma)) : 40.0;
  g.annulus_j = static_cast<int>(std::clamp(j, 1.0, 40.0));
  return g;
}

const char* descent_case_name(DescentCase c) {
  return c == DescentCase::RadialField ? "radial_field" : "compact_field";
}

DescentField select_descent_field(const TriMesh& mesh, const DescentOptions& o) {
  if (!(o.far_mass_threshold > 0) || !(o.far_radius > 0) || !(o.rho_growth > 1))
    fail(ErrorCode::Parameter, "tightening", "far-mass threshold, far radius and rho growth must be positive");
  DescentField d;
  d.area = gaussian_area(mesh).value;
  d.far_mass = mass_near_infinity(mesh, o.far_radius);
  const double frac = d.area > 0 ? d.far_mass / d.area : 1.0;
  if (frac >= o.far_mass_threshold) {
    d.which = DescentCase::RadialField;
    double rho = std::max(3.0, o.far_radius / 2);
    for (;; rho *= o.rho_growth) {
      if (rho > o.rho_max) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "no cutoff radius up to %.6g with annulus mass below %.3g of F", o.rho_max,
                      o.far_mass_threshold / 100);
        fail(ErrorCode::Selection, "tightening", buf);
      }
      d.annulus_mass = mass_in_annulus(mesh, rho, 2 * rho);
      if (d.area > 0 ? d.annulus_mass <= o.far_mass_threshold / 100 * d.area : d.annulus_mass == 0) break;
    }
    const RadialField rf = radial_field({rho, o.epsilon});
    d.field = rf.field;
    d.c1_norm = rf.c1_norm;
    d.predicted_rate = -o.far_mass_threshold / 8 * d.area;
    return d;
  }
  d.which = DescentCase::CompactField;
  const DifferentialData dd = differential_data(mesh);
  std::vector<Vec3> v(mesh.num_vertices(), Vec3::Zero());
  const double half = o.far_radius / 2;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mesh.is_boundary(i)) continue;
    const Vec3& x = mesh.vertex(i);
    const double b = 1 - support_bump_step(x.norm() / half - 1);
    const double r = dd.mean_curvature[i] - 0.5 * x.dot(dd.normal[i]);
    v[i] = -b * r * dd.normal[i];
  }
  d.field = VectorFieldSpec::sampled(std::move(v));
  d.c1_norm = field_c1_norm(d.field, mesh);
  if (d.c1_norm > 1) {
    d.scale = 1 / d.c1_norm;
    for (Vec3& s : d.field.samples) s /= d.c1_norm;
    d.c1_norm = 1;
  }
  d.predicted_rate = std::min(0.0, first_variation(mesh, d.field));
  return d;
}

double shortest_edge(const TriMesh& mesh) {
  double m = INFINITY;
  for (const Face& f : mesh.faces())
    for (int k = 0; k < 3; ++k) m = std::min(m, (mesh.vertex(f[k]) - mesh.vertex(f[(k + 1) % 3])).norm());
  return m;
}

TriMesh apply_descent(const TriMesh& mesh, const DescentField& d, double h) {
  if (d.which == DescentCase::CompactField) {
    // Rims do not move, so an attached tail stays valid.
    return euler_step(mesh, d.field, h).with_tail(mesh.tail());
  }
  if (mesh.tail()) fail(ErrorCode::Unsupported, "tightening", "radial flow of a mesh with an analytic tail");
  std::vector<Vec3> v;
  v.reserve(mesh.num_vertices());
  const std::optional<CutoffSpec> spec = d.field.cutoff;
  for (const Vec3& x : mesh.vertices()) v.push_back(radial_flow_map(h, x, spec));
  return mesh.with_vertices(std::move(v));
}

TightenResult tighten(const TriMesh& mesh, int max_steps, const TightenOptions& o) {
  if (max_steps < 0) fail(ErrorCode::Parameter, "tightening", "max_steps must be non-negative");
  const StepControl& sc = o.step;
  if (!(sc.max_time > 0) || !(sc.shrink > 0 && sc.shrink < 1) || !(sc.min_time > 0))
    fail(ErrorCode::Parameter, "tightening", "invalid step control");
  using clock = std::chrono::steady_clock;
  TightenResult res;
  res.mesh = mesh;
  double F = gaussian_area(mesh, o.quad).value;
  StationarityGap gap = stationarity_gap(mesh, o.library, o.quad);
  res.trace.push_back({0, F, DescentCase::CompactField, gap.gamma, 0, 0, 0, 0});
  for (int step = 1; step <= max_steps; ++step) {
    if (gap.gamma < o.gate) break;
    const auto t0 = clock::now();
    const DescentField d = select_descent_field(res.mesh, o.descent);
    const double frac = d.which == DescentCase::RadialField ? sc.radial_accept_fraction : sc.accept_fraction;
    double h = sc.max_time;
    if (d.which == DescentCase::CompactField && sc.cfl > 0)
      h = std::min(h, sc.cfl * std::pow(shortest_edge(res.mesh), 2) / d.scale);
    for (;;) {
      TriMesh cand = apply_descent(res.mesh, d, h);
      const double Fc = gaussian_area(cand, o.quad).value;
      if (Fc < F && Fc <= F - frac * std::abs(d.predicted_rate) * h) {
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        res.trace.push_back({step, Fc, d.which, gap.gamma, d.c1_norm, h, d.predicted_rate, secs});
        res.mesh = std::move(cand);
        F = Fc;
        break;
      }
      h *= sc.shrink;
      if (h < sc.min_time) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "line search stalled at step %d: F=%.9g gamma=%.6g case=%s rate=%.6g", step,
                      F, gap.gamma, descent_case_name(d.which), d.predicted_rate);
        fail(ErrorCode::Stall, "tightening", buf);
      }
    }
    gap = stationarity_gap(res.mesh, o.library, o.quad);
  }
  res.final_gamma = gap.gamma;
  res.reached_gate = gap.gamma < o.gate;
  return res;
}

TriMesh relax_mesh(const TriMesh& mesh, int sweeps, double area_budget, bool* accepted) {
  const auto nbr = vertex_neighbors(mesh);
  std::vector<Vec3> x = mesh.vertices();
  for (int s = 0; s < sweeps; ++s) {
    const DifferentialData d = differential_data(mesh.with_vertices(x));
    std::vector<Vec3> next = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (mesh.is_boundary(i) || nbr[i].empty()) continue;
      Vec3 c = Vec3::Zero();
      for (int j : nbr[i]) c += x[j];
      Vec3 m = c / static_cast<double>(nbr[i].size()) - x[i];
      m -= m.dot(d.normal[i]) * d.normal[i];
      next[i] = x[i] + 0.5 * m;
    }
    x = std::move(next);
  }
  TriMesh out = mesh.with_vertices(std::move(x)).with_tail(mesh.tail());
  const bool ok = std::abs(gaussian_area(out).value - gaussian_area(mesh).value) <= area_budget;
  if (accepted) *accepted = ok;
  return ok ? out : mesh;
}

FlowTrajectory shrinker_flow(const TriMesh& mesh, int steps, double dt, const FlowOptions& o) {
  if (steps < 0 || !(dt > 0)) fail(ErrorCode::Parameter, "tightening", "steps must be >= 0 and dt > 0");
  if (!mesh.is_closed()) fail(ErrorCode::Precondition, "tightening", "shrinker flow needs a closed mesh");
  FlowTrajectory tr;
  TriMesh cur = mesh;
  double F = gaussian_area(cur, o.quad).value;
  tr.meshes.push_back(cur);
  tr.area.push_back(F);
  tr.residual_sup.push_back(shrinker_residual(cur).sup);
  for (int step = 1; step <= steps; ++step) {
    const DifferentialData d = differential_data(cur);
    std::vector<Vec3> move(cur.num_vertices());
    for (std::size_t i = 0; i < move.size(); ++i) {
      const Vec3& x = cur.vertex(i);
      move[i] = -(d.mean_curvature[i] - 0.5 * x.dot(d.normal[i])) * d.normal[i];
    }
    double h = dt, used = 0;
    for (; h >= o.min_dt; h *= 0.5) {
      std::vector<Vec3> v = cur.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += h * move[i];
      TriMesh cand = cur.with_vertices(std::move(v));
      const double Fc = gaussian_area(cand, o.quad).value;
      if (Fc <= F) {
        cur = std::move(cand);
        F = Fc;
        used = h;
        break;
      }
    }
    if (o.remesh_every > 0 && step % o.remesh_every == 0) {
      bool ok = false;
      TriMesh r = relax_mesh(cur, 3, o.remesh_area_budget, &ok);
      if (ok) {
        const double Fr = gaussian_area(r, o.quad).value;
        // Never let a remesh raise F.
        if (Fr <= F) {
          cur = std::move(r);
          F = Fr;
          ++tr.remesh_events;
        }
      }
    }
    if (o.remesh_every == 0 && min_face_angle(cur) < o.min_angle_deg * M_PI / 180) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "minimum face angle below %.3g degrees at step %d", o.min_angle_deg, step);
      fail(ErrorCode::Quality, "tightening", buf);
    }
    tr.area.push_back(F);
    tr.dt.push_back(used);
    tr.residual_sup.push_back(shrinker_residual(cur).sup);
    if (o.keep_every > 0 && step % o.keep_every == 0 && step != steps) tr.meshes.push_back(cur);
  }
  tr.meshes.push_back(cur);
  return tr;
}

}  // namespace shrinker
