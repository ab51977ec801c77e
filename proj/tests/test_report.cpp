#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shrinker/acceptance.hpp"
#include "shrinker/entropy.hpp"
#include "shrinker/error.hpp"
#include "shrinker/parallel.hpp"
#include "shrinker/primitives.hpp"
#include "shrinker/report.hpp"

using namespace shrinker;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TriMesh sphere(double R, int ref) {
  PrimitiveParams p;
  p.radius = R;
  return generate_primitive(PrimitiveKind::Sphere, p, ref);
}

}  // namespace

TEST_CASE("nine significant digits") {
  CHECK(fmt9(1.0) == "1");
  CHECK(fmt9(4 / std::exp(1.0)) == "1.47151776");
  CHECK(fmt9(-1.23456789123e-7) == "-1.23456789e-07");
  CHECK(fmt9(INFINITY) == "inf");
  CHECK(fmt9(NAN) == "nan");
}

TEST_CASE("entropy grid csv") {
  const EntropyResult r = entropy(sphere(2, 3));
  const auto rows = parse_csv(entropy_grid_csv(r));
  REQUIRE(rows.size() == r.trace.size() + 1);
  CHECK(rows[0] == std::vector<std::string>{"x0x", "x0y", "x0z", "t0", "F"});
  double best = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    best = std::max(best, std::stod(rows[i][4]));
  }
  CHECK(fmt9(best) == fmt9(r.lambda));
  const auto j = nlohmann::json::parse(entropy_json(r));
  CHECK(std::abs(j["lambda"].get<double>() - r.lambda) < 1e-8);
}

TEST_CASE("tighten trace csv") {
  PrimitiveParams p;
  p.epsilon = 0.1;
  const TightenResult r = tighten(generate_primitive(PrimitiveKind::PerturbedSphere, p, 3), 20);
  const auto rows = parse_csv(tighten_trace_csv(r));
  CHECK(rows[0] == std::vector<std::string>{"step", "F", "case", "gamma", "dt"});
  REQUIRE(rows.size() == r.trace.size() + 1);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][1]) <= std::stod(rows[i - 1][1]));
    CHECK((rows[i][2] == "compact_field" || rows[i][2] == "radial_field"));
  }
}

TEST_CASE("width grid csv is byte-identical across runs and thread counts") {
  const auto fam = SweepoutFamily::sphere_family(3);
  WidthGrid g;
  g.tau_points = 17;
  const std::string a = width_grid_csv(width_upper_bound(fam, g));
  set_thread_count(1);
  const std::string b = width_grid_csv(width_upper_bound(fam, g));
  set_thread_count(0);
  CHECK(a == b);
  const auto rows = parse_csv(a);
  CHECK(rows[0] == std::vector<std::string>{"t1", "t2", "t3", "tau", "F"});
  CHECK(rows.size() == 18);
}

TEST_CASE("slice and manifest json") {
  Slice s;
  s.kind = Slice::Kind::Plane;
  s.normal = Vec3(0, 0, 1);
  s.offset = 0.25;
  auto j = nlohmann::json::parse(slice_json(s));
  CHECK(j["kind"] == "plane");
  CHECK(j["offset"].get<double>() == 0.25);

  Manifest m;
  m.command = "area";
  m.config = {{"refine", "5"}, {"seed", "0"}};
  m.wall_seconds = 0.5;
  j = nlohmann::json::parse(manifest_json(m));
  CHECK(j["command"] == "area");
  CHECK(j["config"]["seed"] == "0");
  CHECK(j["versions"]["shrinker"] == kVersion);
  CHECK(j["wall_seconds"].get<double>() == 0.5);
}

TEST_CASE("unwritable path") {
  try {
    write_text("/nonexistent-dir/x.csv", "a");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("acceptance registry") {
  CHECK(acceptance_criteria().size() == 16);
  for (int i = 0; i < 16; ++i) CHECK(acceptance_criteria()[i].first == i + 1);
  CHECK_THROWS_AS(run_criterion(0), Error);
  CHECK_THROWS_AS(run_criterion(16), Error);
  const CriterionResult r = run_criterion(13);
  CHECK(r.pass);
  CHECK(format_criterion(r).rfind("criterion 13 PASS", 0) == 0);
}
