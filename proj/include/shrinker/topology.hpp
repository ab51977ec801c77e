#pragma once

#include <vector>

#include "shrinker/mesh.hpp"

namespace shrinker {

struct ComponentTopology {
  int vertices = 0, edges = 0, faces = 0;
  int euler_characteristic = 0;
  int boundary_loops = 0;
  bool orientable = true;
  bool consistently_oriented = true;
  bool manifold = true;   // every edge has one or two incident faces
  int genus = -1;         // -1 when undefined (non-orientable or non-manifold)
};

struct TopologyReport {
  std::vector<ComponentTopology> components;
  int component_count() const { return static_cast<int>(components.size()); }
  int total_genus() const;          // -1 if any component is undefined
  int euler_characteristic() const;
  int boundary_loops() const;
  bool closed() const;
  bool orientable() const;
  bool consistently_oriented() const;
  bool watertight() const;          // closed, manifold, consistently oriented
};

TopologyReport topology_report(const TriMesh& mesh);

}  // namespace shrinker
