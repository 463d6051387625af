#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include <sfo/metric.hpp>
#include <sfo/solvers.hpp>

namespace sfo {

// All writers emit deterministic bytes: '.' decimal separator, LF newlines,
// 17 significant digits for floating-point values. All readers reject
// trailing garbage and report 1-based line numbers.

// OFF: "OFF" header, counts line "n f e", n vertex lines of 3 reals,
// f face lines "3 i j k".
std::pair<Mesh, Embedding> read_off(const std::string& path);
void write_off(const std::string& path, const Mesh& mesh, const Embedding& x);

// Convenience OBJ reader: interprets v/f lines only (triangles, 1-based
// indices, optional v/vt/vn slashes); other directives are skipped.
std::pair<Mesh, Embedding> read_obj(const std::string& path);

// Dense matrix text: first line "rows cols", then one whitespace-separated
// row per line.
Eigen::MatrixXd read_dense_matrix(const std::string& path);
void write_dense_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Edge lengths as "i,j,length" lines; the file must cover every canonical
// edge exactly once.
DiscreteMetric read_edge_csv(const std::string& path, const Mesh& mesh);
void write_edge_csv(const std::string& path, const Mesh& mesh, const DiscreteMetric& metric);

// Per-vertex scalars, one value per line.
void write_vertex_csv(const std::string& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_vertex_csv(const std::string& path);

// Point map: line r holds "r t_r" with 0-based indices; t_r in [0,n) is
// checked by the functional-map constructor.
std::vector<int> read_point_map(const std::string& path);
void write_point_map(const std::string& path, const std::vector<int>& point_map);

// Solver trace: header plus one row per inner iteration
// (outer_iter,phase,inner_iter,energy,stress,mu,halvings).
void write_trace_csv(const std::string& path, const SolverTrace& trace);

}  // namespace sfo
