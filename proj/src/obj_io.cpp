#include "shrinker/obj_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "shrinker/error.hpp"

namespace shrinker {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "bad number '" + s + "'");
  }
}

}  // namespace

TriMesh read_obj_stream(std::istream& in, const std::string& name) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  std::vector<int> face_lines;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "v") {
      if (tok.size() != 4) {
        if (tok.size() == 5)
          fail(ErrorCode::Unsupported, "mesh-core",
               "line " + std::to_string(lineno) + ": homogeneous vertex coordinates are not supported");
        throw ParseError(lineno, "vertex needs exactly 3 coordinates");
      }
      v.emplace_back(parse_double(tok[1], lineno), parse_double(tok[2], lineno),
                     parse_double(tok[3], lineno));
    } else if (kw == "f") {
      if (tok.size() < 4) throw ParseError(lineno, "face needs 3 indices");
      if (tok.size() > 4)
        fail(ErrorCode::Unsupported, "mesh-core",
             "line " + std::to_string(lineno) + ": polygon faces with more than 3 vertices are not supported");
      Face t;
      for (int k = 0; k < 3; ++k) {
        const std::string& s = tok[k + 1];
        if (s.find('/') != std::string::npos)
          fail(ErrorCode::Unsupported, "mesh-core",
               "line " + std::to_string(lineno) + ": texture/normal face references are not supported");
        long long idx = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
        if (ec != std::errc() || p != s.data() + s.size())
          throw ParseError(lineno, "bad face index '" + s + "'");
        if (idx == 0) throw ParseError(lineno, "face index 0 (indices are 1-based)");
        if (idx < 0)
          fail(ErrorCode::Unsupported, "mesh-core",
               "line " + std::to_string(lineno) + ": relative (negative) face indices are not supported");
        t[k] = static_cast<int>(idx - 1);
      }
      f.push_back(t);
      face_lines.push_back(lineno);
    } else {
      fail(ErrorCode::Unsupported, "mesh-core",
           "line " + std::to_string(lineno) + ": OBJ statement '" + kw + "' is not supported");
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int k = 0; k < 3; ++k)
      if (f[i][k] >= static_cast<int>(v.size()))
        throw ParseError(face_lines[i], "face index " + std::to_string(f[i][k] + 1) + " exceeds vertex count");
  return TriMesh(std::move(v), std::move(f), name);
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "mesh-core", "cannot open '" + path + "'");
  return read_obj_stream(in, path);
}

void write_obj_stream(std::ostream& out, const TriMesh& mesh) {
  char buf[96];
  if (!mesh.metadata().empty()) out << "# " << mesh.metadata() << "\n";
  for (const Vec3& x : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", x.x(), x.y(), x.z());
    out << buf;
  }
  for (const Face& t : mesh.faces()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "mesh-core", "cannot write '" + path + "'");
  write_obj_stream(out, mesh);
  if (!out) fail(ErrorCode::Io, "mesh-core", "write failed for '" + path + "'");
}

}  // namespace shrinker
