#include "shrinker/report.hpp"

#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shrinker/error.hpp"

namespace shrinker {

namespace {

using nlohmann::json;

// JSON numbers go through fmt9 so files are stable across runs and platforms.
json num(double v) {
  if (!std::isfinite(v)) return fmt9(v);
  return json::parse(fmt9(v));
}

json vec(const Vec3& v) { return json::array({num(v.x()), num(v.y()), num(v.z())}); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string entropy_grid_csv(const EntropyResult& r) {
  std::ostringstream o;
  o << "x0x,x0y,x0z,t0,F\n";
  for (const auto& p : r.trace) {
    o << fmt9(p.params.x0.x()) << ',' << fmt9(p.params.x0.y()) << ',' << fmt9(p.params.x0.z()) << ','
      << fmt9(p.params.t0) << ',' << fmt9(p.value) << '\n';
  }
  return o.str();
}

std::string tighten_trace_csv(const TightenResult& r) {
  std::ostringstream o;
  o << "step,F,case,gamma,dt\n";
  for (const auto& t : r.trace) {
    o << t.step << ',' << fmt9(t.area) << ',' << descent_case_name(t.which) << ',' << fmt9(t.gamma) << ','
      << fmt9(t.dt) << '\n';
  }
  return o.str();
}

std::string width_grid_csv(const WidthReport& r) {
  std::ostringstream o;
  o << "t1,t2,t3,tau,F\n";
  for (const auto& s : r.samples) {
    o << fmt9(s.t.x()) << ',' << fmt9(s.t.y()) << ',' << fmt9(s.t.z()) << ',' << fmt9(s.tau) << ',' << fmt9(s.area)
      << '\n';
  }
  return o.str();
}

std::string flow_csv(const FlowTrajectory& f) {
  std::ostringstream o;
  o << "step,F,dt,residual_sup\n";
  for (std::size_t i = 0; i < f.area.size(); ++i) {
    o << i << ',' << fmt9(f.area[i]) << ',' << (i == 0 ? fmt9(0) : fmt9(f.dt[i - 1])) << ','
      << (i < f.residual_sup.size() ? fmt9(f.residual_sup[i]) : "") << '\n';
  }
  return o.str();
}

std::string entropy_json(const EntropyResult& r) {
  json j;
  j["lambda"] = num(r.lambda);
  j["argmax"] = {{"x0", vec(r.argmax.x0)}, {"t0", num(r.argmax.t0)}};
  j["starts_used"] = r.starts_used;
  j["trace_points"] = r.trace.size();
  return dump(j);
}

std::string tighten_json(const TightenResult& r) {
  json j;
  j["steps"] = r.trace.empty() ? 0 : r.trace.size() - 1;
  j["initial_F"] = r.trace.empty() ? num(0) : num(r.trace.front().area);
  j["final_F"] = r.trace.empty() ? num(0) : num(r.trace.back().area);
  j["final_gamma"] = num(r.final_gamma);
  j["reached_gate"] = r.reached_gate;
  json cases = json::object();
  for (const auto& t : r.trace)
    if (t.step > 0) cases[descent_case_name(t.which)] = cases.value(descent_case_name(t.which), 0) + 1;
  j["case_counts"] = cases;
  return dump(j);
}

std::string width_json(const WidthReport& r) {
  json j;
  j["max_area"] = num(r.max_area);
  j["argmax"] = {{"t", vec(r.argmax_t)}, {"tau", num(r.argmax_tau)}};
  j["tau_step"] = num(r.tau_step);
  json h = json::array();
  for (double v : r.history) h.push_back(num(v));
  j["history"] = h;
  j["analytic_max"] = r.analytic_max ? num(*r.analytic_max) : json(nullptr);
  j["grid"] = {{"t_points", r.grid.t_points},   {"tau_points", r.grid.tau_points},
               {"inflate", num(r.grid.inflate)}, {"refine_factor", r.grid.refine_factor},
               {"rescore", r.grid.rescore}};
  j["samples"] = r.samples.size();
  return dump(j);
}

std::string spectrum_json(const StabilitySpectrum& s) {
  json j;
  json ev = json::array();
  for (double v : s.eigenvalues) ev.push_back(num(v));
  j["eigenvalues"] = ev;
  j["index"] = s.index;
  j["tol"] = num(s.tol);
  j["max_residual"] = num(s.max_residual);
  j["iterations"] = s.iterations;
  return dump(j);
}

std::string slice_json(const Slice& s) {
  json j;
  switch (s.kind) {
    case Slice::Kind::Plane:
      j["kind"] = "plane";
      j["normal"] = vec(s.normal);
      j["offset"] = num(s.offset);
      break;
    case Slice::Kind::Mesh:
      j["kind"] = "mesh";
      j["center"] = vec(s.center);
      j["dilation"] = num(s.dilation);
      break;
    case Slice::Kind::Empty:
      j["kind"] = "empty";
      break;
  }
  return dump(j);
}

std::string minmax_json(const MinmaxLocation& m) {
  json j;
  j["t"] = vec(m.t);
  j["tau"] = num(m.tau);
  j["area"] = num(m.area);
  j["nearest"] = m.gap.nearest_name;
  j["gamma"] = num(m.gap.gamma);
  j["plane_distance"] = num(m.plane_distance);
  j["slice"] = json::parse(slice_json(m.slice));
  return dump(j);
}

std::string manifest_json(const Manifest& m) {
  json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["versions"] = {{"shrinker", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"cxx", std::to_string(__cplusplus)}};
  j["wall_seconds"] = num(m.wall_seconds);
  j["outputs"] = m.outputs;
  return dump(j);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "report", "cannot open " + path + " for writing");
  f << content;
  f.flush();
  if (!f) fail(ErrorCode::Io, "report", "write failed for " + path);
}

}  // namespace shrinker
