#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shrinker/mesh.hpp"
#include "shrinker/quadrature.hpp"
#include "shrinker/vector_field.hpp"

namespace shrinker {

// Model shrinkers: planes and cylinders are families over their normal/axis,
// the sphere is rigid under rotations.
struct LibraryMember {
  enum class Kind { Plane, Sphere, Cylinder };
  Kind kind = Kind::Sphere;
  std::string name;
  double radius = 0;        // sphere 2, cylinder sqrt 2
  double area = 0;          // F of the model: 1, 4/e, sqrt(2 pi / e)
};

struct ShrinkerLibrary {
  std::vector<LibraryMember> members;
  static ShrinkerLibrary standard();
};

// Reference mesh of a member at the given refinement (with tail where the
// model is non-compact).
TriMesh library_mesh(const LibraryMember& m, int refinement);

struct MemberDistance {
  double point_rms = 0;   // weighted RMS distance to the aligned model
  double normal_rms = 0;  // weighted RMS of sin(angle) between normals
  double area_gap = 0;    // |F - F(model)|
  Vec3 direction = Vec3::UnitZ();  // fitted plane normal / cylinder axis
  double total() const { return point_rms + normal_rms + area_gap; }
};

// Gaussian-weighted deviation of the mesh from the member, minimised over
// the member's symmetry parameters.
MemberDistance member_distance(const TriMesh& mesh, const LibraryMember& m, const QuadratureSpec& q = {});

struct StationarityGap {
  double gamma = 0;
  int nearest = -1;  // index into the library
  std::string nearest_name;
  int annulus_j = 1;  // ceil(-log2 gamma) in [1, 40]
  std::vector<MemberDistance> distances;
};

StationarityGap stationarity_gap(const TriMesh& mesh, const ShrinkerLibrary& lib = ShrinkerLibrary::standard(),
                                 const QuadratureSpec& q = {});

enum class DescentCase { CompactField, RadialField };
const char* descent_case_name(DescentCase c);

struct DescentOptions {
  double far_mass_threshold = 0.01;  // as a fraction of F
  double far_radius = 8.0;
  double rho_growth = 1.05;  // search step for the cutoff radius
  double rho_max = 1e4;
  double epsilon = 0.05;     // cutoff ramp
};

struct DescentField {
  VectorFieldSpec field;
  DescentCase which = DescentCase::CompactField;
  double predicted_rate = 0;  // first-order dF/dt, <= 0
  double far_mass = 0;        // Gaussian area beyond far_radius
  double area = 0;            // F of the mesh
  double annulus_mass = 0;    // radial case: mass in [rho, 2 rho]
  double c1_norm = 0;
  double scale = 1;  // factor applied by the C^1 clamp
};

DescentField select_descent_field(const TriMesh& mesh, const DescentOptions& opts = {});

double shortest_edge(const TriMesh& mesh);

// One flow step of length h along a selected field.
TriMesh apply_descent(const TriMesh& mesh, const DescentField& d, double h);

struct StepControl {
  double max_time = 0.5;
  double shrink = 0.5;
  double min_time = 1e-8;
  double accept_fraction = 0.1;  // compact case: required share of |rate| h
  double radial_accept_fraction = 0.9;
  // Compact case: h * scale <= cfl * (shortest edge)^2, so the explicit
  // curvature step stays stable at the mesh scale. 0 disables.
  double cfl = 0.2;
};

struct TightenOptions {
  DescentOptions descent;
  StepControl step;
  double gate = 2e-2;  // stop when gamma drops below
  ShrinkerLibrary library = ShrinkerLibrary::standard();
  QuadratureSpec quad{};
};

struct TightenRecord {
  int step = 0;
  double area = 0;  // F after the step (step 0: initial)
  DescentCase which = DescentCase::CompactField;
  double gamma = 0;  // before the step
  double field_norm = 0;
  double dt = 0;
  double predicted_rate = 0;
  double seconds = 0;
};

struct TightenResult {
  std::vector<TightenRecord> trace;
  TriMesh mesh;
  double final_gamma = 0;
  bool reached_gate = false;
};

TightenResult tighten(const TriMesh& mesh, int max_steps, const TightenOptions& opts = {});

struct FlowOptions {
  int remesh_every = 0;  // 0: never
  double min_dt = 1e-10;
  double min_angle_deg = 1.0;
  double remesh_area_budget = 1e-4;
  int keep_every = 0;  // store every k-th mesh (0: only the final one)
  QuadratureSpec quad{};
};

struct FlowTrajectory {
  std::vector<TriMesh> meshes;  // initial, kept snapshots, final
  std::vector<double> area;     // F after each step, area[0] initial
  std::vector<double> dt;       // accepted step length per step
  std::vector<double> residual_sup;
  int remesh_events = 0;
};

// x <- x - dt (H - <x, n>/2) n with backtracking on F.
FlowTrajectory shrinker_flow(const TriMesh& mesh, int steps, double dt, const FlowOptions& opts = {});

// Tangential relaxation toward one-ring centroids; rims fixed. Rejected
// (input returned) when F moves by more than `area_budget`.
TriMesh relax_mesh(const TriMesh& mesh, int sweeps, double area_budget, bool* accepted = nullptr);

}  // namespace shrinker
