#include <sfo/mesh.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <string>

namespace sfo {

namespace {

std::uint64_t pack_edge(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

int Mesh::edge_index(int i, int j) const {
  auto it = edge_lookup.find(pack_edge(i, j));
  return it == edge_lookup.end() ? -1 : it->second;
}

Mesh build_mesh(int vertex_count, std::vector<std::array<int, 3>> faces) {
  if (vertex_count < 4)
    throw InvalidArgument("build_mesh: vertex_count must be at least 4, got " +
                          std::to_string(vertex_count));
  if (faces.empty()) throw InvalidArgument("build_mesh: face list is empty");

  std::vector<char> referenced(static_cast<std::size_t>(vertex_count), 0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& [a, b, c] = faces[f];
    for (int v : {a, b, c}) {
      if (v < 0 || v >= vertex_count)
        throw IndexOutOfRange("face " + std::to_string(f) + " references vertex " +
                              std::to_string(v) + " outside [0, " +
                              std::to_string(vertex_count) + ")");
      referenced[static_cast<std::size_t>(v)] = 1;
    }
    if (a == b || b == c || c == a)
      throw DegenerateFace("face " + std::to_string(f) + " repeats a vertex index");
  }
  for (int v = 0; v < vertex_count; ++v)
    if (!referenced[static_cast<std::size_t>(v)])
      throw UnreferencedVertex("vertex " + std::to_string(v) + " appears in no face");

  // std::map keyed on (min,max) yields the canonical lexicographic edge order.
  struct Incidence {
    int face;
    int opposite;
  };
  std::map<std::pair<int, int>, std::vector<Incidence>> incident;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& [a, b, c] = faces[f];
    const int fi = static_cast<int>(f);
    incident[{std::min(a, b), std::max(a, b)}].push_back({fi, c});
    incident[{std::min(b, c), std::max(b, c)}].push_back({fi, a});
    incident[{std::min(c, a), std::max(c, a)}].push_back({fi, b});
  }

  Mesh mesh;
  mesh.vertex_count = vertex_count;
  mesh.faces = std::move(faces);
  mesh.edges.reserve(incident.size());
  mesh.edge_opposites.reserve(incident.size());
  mesh.edge_faces.reserve(incident.size());

  for (const auto& [pair, list] : incident) {
    if (list.size() != 2)
      throw NonManifoldEdge("edge (" + std::to_string(pair.first) + "," +
                            std::to_string(pair.second) + ") lies in " +
                            std::to_string(list.size()) + " faces, expected 2");
    const int e = static_cast<int>(mesh.edges.size());
    mesh.edges.push_back({pair.first, pair.second});
    mesh.edge_opposites.push_back({list[0].opposite, list[1].opposite});
    mesh.edge_faces.push_back({list[0].face, list[1].face});
    mesh.edge_lookup.emplace(pack_edge(pair.first, pair.second), e);
  }

  mesh.face_edges.resize(mesh.faces.size());
  mesh.vertex_faces.resize(static_cast<std::size_t>(vertex_count));
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& [a, b, c] = mesh.faces[f];
    mesh.face_edges[f] = {mesh.edge_index(a, b), mesh.edge_index(b, c), mesh.edge_index(c, a)};
    for (int v : {a, b, c}) mesh.vertex_faces[static_cast<std::size_t>(v)].push_back(static_cast<int>(f));
  }

  mesh.vertex_edges.resize(static_cast<std::size_t>(vertex_count));
  for (int e = 0; e < mesh.edge_count(); ++e) {
    mesh.vertex_edges[static_cast<std::size_t>(mesh.edges[static_cast<std::size_t>(e)][0])].push_back(e);
    mesh.vertex_edges[static_cast<std::size_t>(mesh.edges[static_cast<std::size_t>(e)][1])].push_back(e);
  }

  return mesh;
}

std::array<int, 2> edge_opposite_vertices(const Mesh& mesh, int edge) {
  if (edge < 0 || edge >= mesh.edge_count())
    throw IndexOutOfRange("edge index " + std::to_string(edge) + " outside [0, " +
                          std::to_string(mesh.edge_count()) + ")");
  return mesh.edge_opposites[static_cast<std::size_t>(edge)];
}

bool is_connected(const Mesh& mesh) {
  if (mesh.vertex_count == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(mesh.vertex_count), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int e : mesh.vertex_edges[static_cast<std::size_t>(v)]) {
      const auto& [a, b] = mesh.edges[static_cast<std::size_t>(e)];
      const int other = (a == v) ? b : a;
      if (!seen[static_cast<std::size_t>(other)]) {
        seen[static_cast<std::size_t>(other)] = 1;
        ++reached;
        frontier.push(other);
      }
    }
  }
  return reached == mesh.vertex_count;
}

}  // namespace sfo
