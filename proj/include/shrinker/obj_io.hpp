#pragma once

#include <iosfwd>
#include <string>

#include "shrinker/mesh.hpp"

namespace shrinker {

// OBJ subset: `v x y z`, `f i j k` (1-based triangles), `#` comments.
TriMesh read_obj(const std::string& path);
TriMesh read_obj_stream(std::istream& in, const std::string& name = "stream");
void write_obj(const std::string& path, const TriMesh& mesh);
void write_obj_stream(std::ostream& out, const TriMesh& mesh);

}  // namespace shrinker
