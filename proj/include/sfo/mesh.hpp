#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <sfo/errors.hpp>

namespace sfo {

// Closed-manifold triangle mesh connectivity. Vertices are integers in
// [0, vertex_count); faces are oriented index triples. Every edge must be
// shared by exactly two faces (boundary meshes are rejected).
//
// Edges are stored as (min,max) pairs sorted lexicographically. This
// canonical order fixes the layout of every edge-indexed vector and matrix
// in the library, so identical inputs always produce identical layouts.
//
// Immutable after build_mesh; safe to share across concurrent readers.
struct Mesh {
  int vertex_count = 0;
  std::vector<std::array<int, 3>> faces;

  // Derived connectivity, populated by build_mesh.
  std::vector<std::array<int, 2>> edges;           // canonical (i<j) pairs
  std::vector<std::array<int, 2>> edge_opposites;  // (k,h) opposite each edge, in face-list order
  std::vector<std::array<int, 2>> edge_faces;      // the two faces incident to each edge
  std::vector<std::array<int, 3>> face_edges;      // per face (i,j,k): edge indices of ij, jk, ki
  std::vector<std::vector<int>> vertex_faces;      // faces containing each vertex
  std::vector<std::vector<int>> vertex_edges;      // incident edges, ascending edge index

  std::unordered_map<std::uint64_t, int> edge_lookup;  // packed (min,max) -> edge index

  int edge_count() const { return static_cast<int>(edges.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  // Canonical edge index of the unordered pair {i,j}, or -1 if ij is not an edge.
  int edge_index(int i, int j) const;
};

// Builds and validates the full connectivity. Throws NonManifoldEdge,
// DegenerateFace, IndexOutOfRange, UnreferencedVertex, InvalidArgument.
Mesh build_mesh(int vertex_count, std::vector<std::array<int, 3>> faces);

// The two vertices completing the two triangles incident to an edge.
std::array<int, 2> edge_opposite_vertices(const Mesh& mesh, int edge);

// True if the edge graph is connected (BFS over edges).
bool is_connected(const Mesh& mesh);

}  // namespace sfo
