#include "shrinker/topology.hpp"

#include <numeric>
#include <queue>
#include <unordered_map>

namespace shrinker {

namespace {

struct EdgeUse {
  int face;
  bool forward;  // traversed a->b with a < b
};

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

int TopologyReport::total_genus() const {
  int g = 0;
  for (const auto& c : components) {
    if (c.genus < 0) return -1;
    g += c.genus;
  }
  return g;
}

int TopologyReport::euler_characteristic() const {
  int s = 0;
  for (const auto& c : components) s += c.euler_characteristic;
  return s;
}

int TopologyReport::boundary_loops() const {
  int s = 0;
  for (const auto& c : components) s += c.boundary_loops;
  return s;
}

bool TopologyReport::closed() const { return boundary_loops() == 0; }

bool TopologyReport::orientable() const {
  for (const auto& c : components)
    if (!c.orientable) return false;
  return true;
}

bool TopologyReport::consistently_oriented() const {
  for (const auto& c : components)
    if (!c.consistently_oriented) return false;
  return true;
}

bool TopologyReport::watertight() const {
  for (const auto& c : components)
    if (c.boundary_loops != 0 || !c.manifold || !c.consistently_oriented) return false;
  return !components.empty();
}

TopologyReport topology_report(const TriMesh& mesh) {
  const int nf = static_cast<int>(mesh.num_faces());
  const int nv = static_cast<int>(mesh.num_vertices());
  std::unordered_map<std::uint64_t, std::vector<EdgeUse>> edges;
  edges.reserve(static_cast<std::size_t>(nf) * 3);
  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.face(f);
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      int lo = std::min(a, b), hi = std::max(a, b);
      std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
      edges[key].push_back({f, a < b});
    }
  }

  // Components over faces sharing an edge.
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  for (auto& [key, uses] : edges)
    for (std::size_t i = 1; i < uses.size(); ++i) {
      int ra = find_root(parent, uses[0].face), rb = find_root(parent, uses[i].face);
      if (ra != rb) parent[ra] = rb;
    }
  std::unordered_map<int, int> comp_of_root;
  std::vector<int> comp(nf);
  for (int f = 0; f < nf; ++f) {
    int r = find_root(parent, f);
    auto it = comp_of_root.find(r);
    if (it == comp_of_root.end()) it = comp_of_root.emplace(r, static_cast<int>(comp_of_root.size())).first;
    comp[f] = it->second;
  }
  TopologyReport rep;
  rep.components.resize(comp_of_root.size());

  // Orientation propagation: flip[f] says whether f must be reversed.
  std::vector<int> flip(nf, -1);
  std::vector<std::vector<std::pair<int, bool>>> adj(nf);  // (neighbor, same_direction)
  for (auto& [key, uses] : edges) {
    if (uses.size() != 2) continue;
    bool same = uses[0].forward == uses[1].forward;
    adj[uses[0].face].push_back({uses[1].face, same});
    adj[uses[1].face].push_back({uses[0].face, same});
    if (same) rep.components[comp[uses[0].face]].consistently_oriented = false;
  }
  for (int s = 0; s < nf; ++s) {
    if (flip[s] >= 0) continue;
    flip[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int f = q.front();
      q.pop();
      for (auto [g, same] : adj[f]) {
        int want = same ? 1 - flip[f] : flip[f];
        if (flip[g] < 0) {
          flip[g] = want;
          q.push(g);
        } else if (flip[g] != want) {
          rep.components[comp[f]].orientable = false;
        }
      }
    }
  }

  // Counts; boundary loops via union-find on boundary edges' vertices.
  std::vector<int> vcomp(nv, -1);
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 3; ++k) vcomp[mesh.face(f)[k]] = comp[f];
  for (int v = 0; v < nv; ++v)
    if (vcomp[v] >= 0) rep.components[vcomp[v]].vertices++;
  for (int f = 0; f < nf; ++f) rep.components[comp[f]].faces++;
  std::vector<int> bparent(nv);
  std::iota(bparent.begin(), bparent.end(), 0);
  std::vector<char> on_boundary(nv, 0);
  for (auto& [key, uses] : edges) {
    auto& c = rep.components[comp[uses[0].face]];
    c.edges++;
    if (uses.size() > 2) c.manifold = false;
    if (uses.size() == 1) {
      int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
      on_boundary[a] = on_boundary[b] = 1;
      int ra = find_root(bparent, a), rb = find_root(bparent, b);
      if (ra != rb) bparent[ra] = rb;
    }
  }
  std::unordered_map<int, int> loops;
  for (int v = 0; v < nv; ++v)
    if (on_boundary[v]) loops.emplace(find_root(bparent, v), vcomp[v]);
  for (auto& [root, c] : loops) rep.components[c].boundary_loops++;

  for (auto& c : rep.components) {
    c.euler_characteristic = c.vertices - c.edges + c.faces;
    int twice = 2 - c.euler_characteristic - c.boundary_loops;
    if (c.orientable && c.manifold && twice >= 0 && twice % 2 == 0) c.genus = twice / 2;
  }
  return rep;
}

}  // namespace shrinker
