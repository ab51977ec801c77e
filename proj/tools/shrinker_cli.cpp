#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shrinker/acceptance.hpp"
#include "shrinker/entropy.hpp"
#include "shrinker/error.hpp"
#include "shrinker/gaussian_measure.hpp"
#include "shrinker/obj_io.hpp"
#include "shrinker/parallel.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/report.hpp"
#include "shrinker/sweepout.hpp"
#include "shrinker/tightening.hpp"
#include "shrinker/topology.hpp"
#include "shrinker/variation.hpp"

namespace fs = std::filesystem;
using namespace shrinker;

namespace {

constexpr const char* kOutEnv = "SHRINKER_OUTPUT_DIR";

struct RunConfig {
  std::string command;
  // mesh source
  std::string gen, mesh_path;
  int refine = 3;
  double radius = 2.0, half_length = 8.0, major = 3.0, minor = 1.0, epsilon = 0.1, offset = 0.0, scale = 1.0;
  std::vector<double> axes{2.2, 2.0, 1.8}, center{0, 0, 0};
  int harmonic = 4;
  bool no_tail = false;
  // numerics
  int quad_order = 7;
  double adaptive = 0.5;
  int threads = 0;
  std::uint64_t seed = 0;
  int modes = 9;
  int steps = 100;
  double dt = 0.01;
  int remesh_every = 0;
  int starts = 5;
  std::string family = "canonical";
  double shift = 50, collar = 0.05;
  int t_points = 9, tau_points = 33, refine_factor = 4;
  long long samples = 200000;
  std::vector<int> only;
  // output
  std::string out;
  bool no_csv = false, no_json = false, write_mesh = true;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt9(v[i]);
  return s;
}

std::map<std::string, std::string> echo(const RunConfig& c) {
  std::map<std::string, std::string> m = {
      {"gen", c.gen},
      {"mesh", c.mesh_path},
      {"refine", std::to_string(c.refine)},
      {"radius", fmt9(c.radius)},
      {"half-length", fmt9(c.half_length)},
      {"major", fmt9(c.major)},
      {"minor", fmt9(c.minor)},
      {"epsilon", fmt9(c.epsilon)},
      {"harmonic", std::to_string(c.harmonic)},
      {"offset", fmt9(c.offset)},
      {"scale", fmt9(c.scale)},
      {"axes", join(c.axes)},
      {"center", join(c.center)},
      {"no-tail", c.no_tail ? "true" : "false"},
      {"quad-order", std::to_string(c.quad_order)},
      {"adaptive", fmt9(c.adaptive)},
      {"threads", std::to_string(c.threads)},
      {"seed", std::to_string(c.seed)},
      {"modes", std::to_string(c.modes)},
      {"steps", std::to_string(c.steps)},
      {"dt", fmt9(c.dt)},
      {"remesh-every", std::to_string(c.remesh_every)},
      {"starts", std::to_string(c.starts)},
      {"family", c.family},
      {"shift", fmt9(c.shift)},
      {"collar", fmt9(c.collar)},
      {"t-points", std::to_string(c.t_points)},
      {"tau-points", std::to_string(c.tau_points)},
      {"refine-factor", std::to_string(c.refine_factor)},
      {"samples", std::to_string(c.samples)},
      {"out", c.out},
  };
  std::string only;
  for (int id : c.only) only += (only.empty() ? "" : ",") + std::to_string(id);
  m["only"] = only;
  return m;
}

Vec3 vec3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) fail(ErrorCode::Parameter, "cli", std::string(what) + " needs three comma-separated values");
  return Vec3(v[0], v[1], v[2]);
}

TriMesh load_mesh(const RunConfig& c) {
  const bool g = !c.gen.empty(), f = !c.mesh_path.empty();
  if (g == f) fail(ErrorCode::Parameter, "cli", "give exactly one mesh source: --gen KIND or --mesh FILE");
  if (f) return read_obj(c.mesh_path);
  PrimitiveParams p;
  p.radius = c.radius;
  p.half_length = c.half_length;
  p.major_radius = c.major;
  p.minor_radius = c.minor;
  p.semi_axes = vec3(c.axes, "--axes");
  p.epsilon = c.epsilon;
  p.harmonic_degree = c.harmonic;
  p.offset = c.offset;
  p.center = vec3(c.center, "--center");
  p.with_tail = !c.no_tail;
  p.scale = c.scale;
  return generate_primitive(parse_primitive_kind(c.gen), p, c.refine);
}

QuadratureSpec quad(const RunConfig& c) {
  QuadratureSpec q;
  q.base_order = c.quad_order;
  q.adaptive_threshold = c.adaptive;
  q.validate();
  return q;
}

class Outputs {
 public:
  explicit Outputs(const RunConfig& c) : cfg_(c) {
    dir_ = c.out;
    if (dir_.empty()) {
      const char* env = std::getenv(kOutEnv);
      dir_ = env && *env ? env : "shrinker_out";
    }
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::Io, "cli", "cannot create output directory " + dir_ + ": " + ec.message());
  }
  void text(const std::string& name, const std::string& content) {
    const std::string path = (fs::path(dir_) / name).string();
    write_text(path, content);
    written_.push_back(name);
  }
  void csv(const std::string& name, const std::string& content) {
    if (!cfg_.no_csv) text(name, content);
  }
  void json(const std::string& name, const std::string& content) {
    if (!cfg_.no_json) text(name, content);
  }
  void mesh(const std::string& name, const TriMesh& m) {
    if (!cfg_.write_mesh) return;
    write_obj((fs::path(dir_) / name).string(), m);
    written_.push_back(name);
  }
  void manifest(double seconds) {
    Manifest m;
    m.command = cfg_.command;
    m.config = echo(cfg_);
    m.config["out"] = dir_;
    m.wall_seconds = seconds;
    m.outputs = written_;
    write_text((fs::path(dir_) / (cfg_.command + "_manifest.json")).string(), manifest_json(m));
  }

 private:
  const RunConfig& cfg_;
  std::string dir_;
  std::vector<std::string> written_;
};

std::string small_json(const std::map<std::string, double>& kv) {
  std::string s = "{\n";
  std::size_t i = 0;
  for (const auto& [k, v] : kv) s += "  \"" + k + "\": " + fmt9(v) + (++i < kv.size() ? ",\n" : "\n");
  return s + "}\n";
}

int cmd_gen(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  const TopologyReport t = topology_report(m);
  std::printf("vertices %zu faces %zu components %d genus %d boundary_loops %d\n", m.num_vertices(), m.num_faces(),
              t.component_count(), t.total_genus(), t.boundary_loops());
  o.mesh("mesh.obj", m);
  return 0;
}

int cmd_area(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  const AreaResult a = gaussian_area(m, quad(c));
  std::printf("F %s +- %s (tail %s)\n", fmt9(a.value).c_str(), fmt9(a.error_estimate).c_str(),
              fmt9(a.tail_correction).c_str());
  o.json("area.json", small_json({{"F", a.value}, {"error_estimate", a.error_estimate}, {"tail", a.tail_correction}}));
  return 0;
}

int cmd_entropy(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  EntropyOptions eo;
  eo.starts = c.starts;
  eo.quad = quad(c);
  const EntropyResult r = entropy(m, eo);
  std::printf("lambda %s at x0 (%s, %s, %s) t0 %s\n", fmt9(r.lambda).c_str(), fmt9(r.argmax.x0.x()).c_str(),
              fmt9(r.argmax.x0.y()).c_str(), fmt9(r.argmax.x0.z()).c_str(), fmt9(r.argmax.t0).c_str());
  o.json("entropy.json", entropy_json(r));
  o.csv("entropy_grid.csv", entropy_grid_csv(r));
  return 0;
}

int cmd_residual(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  const ResidualReport r = shrinker_residual(m);
  std::printf("residual l2 %s sup %s\n", fmt9(r.l2).c_str(), fmt9(r.sup).c_str());
  o.json("residual.json", small_json({{"l2", r.l2}, {"sup", r.sup}}));
  return 0;
}

int cmd_spectrum(const RunConfig& c, Outputs& o, bool index_only) {
  const TriMesh m = load_mesh(c);
  const StabilitySpectrum s = stability_spectrum(m, c.modes);
  if (index_only) {
    std::printf("index %d\n", morse_index(s));
  } else {
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) std::printf("%zu %s\n", i, fmt9(s.eigenvalues[i]).c_str());
    std::printf("index %d\n", s.index);
  }
  o.json(index_only ? "index.json" : "spectrum.json", spectrum_json(s));
  return 0;
}

int cmd_flow(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  FlowOptions fo;
  fo.remesh_every = c.remesh_every;
  fo.quad = quad(c);
  const FlowTrajectory f = shrinker_flow(m, c.steps, c.dt, fo);
  std::printf("steps %zu F %s -> %s residual_sup %s remesh %d\n", f.dt.size(), fmt9(f.area.front()).c_str(),
              fmt9(f.area.back()).c_str(), fmt9(f.residual_sup.empty() ? 0 : f.residual_sup.back()).c_str(),
              f.remesh_events);
  o.csv("flow.csv", flow_csv(f));
  o.mesh("flow_final.obj", f.meshes.back());
  return 0;
}

int cmd_tighten(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  TightenOptions to;
  to.quad = quad(c);
  const TightenResult r = tighten(m, c.steps, to);
  std::printf("steps %zu F %s -> %s gamma %s gate %s\n", r.trace.size() - 1, fmt9(r.trace.front().area).c_str(),
              fmt9(r.trace.back().area).c_str(), fmt9(r.final_gamma).c_str(), r.reached_gate ? "reached" : "open");
  o.csv("tighten_trace.csv", tighten_trace_csv(r));
  o.json("tighten.json", tighten_json(r));
  o.mesh("tightened.obj", r.mesh);
  return 0;
}

int cmd_width(const RunConfig& c, Outputs& o) {
  SweepoutFamily fam = [&] {
    if (c.family == "plane") return SweepoutFamily::plane_family();
    if (c.family == "sphere") return SweepoutFamily::sphere_family(c.refine);
    if (c.family == "translated") return SweepoutFamily::translated_sphere_family(c.shift, c.refine);
    if (c.family == "canonical") return SweepoutFamily::canonical(load_mesh(c), c.collar);
    fail(ErrorCode::Parameter, "cli", "unknown family " + c.family + " (plane, sphere, translated, canonical)");
  }();
  WidthGrid g;
  g.t_points = c.t_points;
  g.tau_points = c.tau_points;
  g.refine_factor = c.refine_factor;
  g.quad = quad(c);
  const WidthReport w = width_upper_bound(fam, g);
  IsoperimetricPath ip;
  ip.samples = c.samples;
  ip.seed = c.seed;
  ip.t = w.argmax_t;
  const IsoperimetricBound b = width_lower_bound_isoperimetric(fam, ip);
  const MinmaxLocation loc = minmax_locate(fam, w);
  std::printf("max F %s at t (%s, %s, %s) tau %s\n", fmt9(w.max_area).c_str(), fmt9(w.argmax_t.x()).c_str(),
              fmt9(w.argmax_t.y()).c_str(), fmt9(w.argmax_t.z()).c_str(), fmt9(w.argmax_tau).c_str());
  std::printf("lower bound %s (half-volume slice F %s)\n", fmt9(b.floor).c_str(), fmt9(b.slice_area).c_str());
  std::printf("nearest %s gamma %s plane distance %s\n", loc.gap.nearest_name.c_str(), fmt9(loc.gap.gamma).c_str(),
              fmt9(loc.plane_distance).c_str());
  o.csv("width_grid.csv", width_grid_csv(w));
  o.json("width.json", width_json(w));
  o.json("minmax.json", minmax_json(loc));
  if (loc.slice.kind == Slice::Kind::Mesh) o.mesh("argmax_slice.obj", loc.slice.mesh);
  else o.json("argmax_slice.json", slice_json(loc.slice));
  return 0;
}

int cmd_degree(const RunConfig& c, Outputs& o) {
  const TriMesh m = load_mesh(c);
  const GaussDegree d = gauss_degree(m);
  std::printf("degree %d raw %s residual %s genus %d\n", d.degree, fmt9(d.raw).c_str(), fmt9(d.residual).c_str(),
              topology_report(m).total_genus());
  o.json("degree.json", small_json({{"degree", d.degree}, {"raw", d.raw}, {"residual", d.residual}}));
  return 0;
}

int cmd_verify(const RunConfig& c, Outputs& o) {
  bool all = true;
  std::string table;
  run_acceptance(c.only, [&](const CriterionResult& r) {
    const std::string line = format_criterion(r);
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    table += line + "\n";
    all = all && r.pass;
  });
  o.text("verify.txt", table);
  std::printf("%s\n", all ? "ALL PASS" : "FAILURES");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Gaussian area, entropy and sweepout tools for triangulated surfaces"};
  app.set_config("--config", "", "flat key=value file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  app.add_option("--gen", c.gen, "primitive: sphere, cylinder, torus, ellipsoid, perturbed_sphere, plane_disk, double_torus");
  app.add_option("--mesh", c.mesh_path, "OBJ file");
  app.add_option("--refine", c.refine, "refinement level")->check(CLI::Range(0, 8));
  app.add_option("--radius", c.radius);
  app.add_option("--half-length", c.half_length, "cylinder");
  app.add_option("--major", c.major, "torus");
  app.add_option("--minor", c.minor, "torus");
  app.add_option("--axes", c.axes, "ellipsoid semi-axes a,b,c")->delimiter(',')->expected(3);
  app.add_option("--center", c.center, "translation x,y,z")->delimiter(',')->expected(3);
  app.add_option("--epsilon", c.epsilon, "perturbed sphere amplitude");
  app.add_option("--harmonic", c.harmonic, "perturbed sphere harmonic degree");
  app.add_option("--offset", c.offset, "plane disk offset");
  app.add_option("--scale", c.scale, "double torus cell size");
  app.add_flag("--no-tail", c.no_tail, "drop analytic tails");
  app.add_option("--quad-order", c.quad_order, "points per triangle: 1, 3 or 7");
  app.add_option("--adaptive", c.adaptive, "adaptive split threshold");
  app.add_option("--threads", c.threads, "worker cap (0: hardware)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", c.seed, "Monte Carlo seed");
  app.add_option("--modes", c.modes, "eigenpairs for spectrum/index")->check(CLI::PositiveNumber);
  app.add_option("--steps", c.steps, "flow/tighten steps")->check(CLI::NonNegativeNumber);
  app.add_option("--dt", c.dt, "flow time step");
  app.add_option("--remesh-every", c.remesh_every);
  app.add_option("--starts", c.starts, "entropy refinement starts");
  app.add_option("--family", c.family, "width: plane, sphere, translated, canonical");
  app.add_option("--shift", c.shift, "translated family scale");
  app.add_option("--collar", c.collar, "canonical family collar width");
  app.add_option("--t-points", c.t_points);
  app.add_option("--tau-points", c.tau_points);
  app.add_option("--refine-factor", c.refine_factor);
  app.add_option("--samples", c.samples, "Monte Carlo samples for enclosed volume");
  app.add_option("--only", c.only, "verify: criterion ids")->delimiter(',');
  app.add_option("--out", c.out, std::string("output directory (default $") + kOutEnv + " or ./shrinker_out)");
  app.add_flag("--no-csv", c.no_csv);
  app.add_flag("--no-json", c.no_json);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "write a generated or loaded mesh"},
      {"area", "Gaussian area F"},
      {"entropy", "entropy lambda and its maximiser"},
      {"residual", "shrinker equation residual"},
      {"spectrum", "top stability eigenvalues"},
      {"index", "Morse index"},
      {"flow", "rescaled mean curvature flow"},
      {"tighten", "F-decreasing tightening"},
      {"width", "sweepout width bounds"},
      {"degree", "Gauss map degree"},
      {"verify", "run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough()->callback([&c, n = name] { c.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    std::fprintf(stderr, "E_USAGE [cli]: %s\n", msg.c_str());
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    set_thread_count(c.threads);
    Outputs out(c);
    int rc = 0;
    if (c.command == "gen") rc = cmd_gen(c, out);
    else if (c.command == "area") rc = cmd_area(c, out);
    else if (c.command == "entropy") rc = cmd_entropy(c, out);
    else if (c.command == "residual") rc = cmd_residual(c, out);
    else if (c.command == "spectrum") rc = cmd_spectrum(c, out, false);
    else if (c.command == "index") rc = cmd_spectrum(c, out, true);
    else if (c.command == "flow") rc = cmd_flow(c, out);
    else if (c.command == "tighten") rc = cmd_tighten(c, out);
    else if (c.command == "width") rc = cmd_width(c, out);
    else if (c.command == "degree") rc = cmd_degree(c, out);
    else if (c.command == "verify") rc = cmd_verify(c, out);
    out.manifest(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return rc;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    std::fprintf(stderr, "%s [%s]: %s\n", error_code_name(e.code()), e.module().c_str(), msg.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "E_INTERNAL [cli]: %s\n", e.what());
    return 1;
  }
}
