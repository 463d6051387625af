#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <vector>

#include <sfo/metric.hpp>

namespace sfo {

// Relative eigenvalue cutoff for Moore-Penrose pseudoinverses of the
// stiffness matrix and the SMACOF graph Laplacian.
inline constexpr double kDefaultPinvRelTol = 1e-10;

// Lumped (diagonal) mass matrix: each vertex carries one third of the area
// of its incident triangles.
struct MassMatrix {
  Eigen::VectorXd diag;

  double total_area() const { return diag.sum(); }
  int size() const { return static_cast<int>(diag.size()); }
};

// Sparse symmetric stiffness matrix with nonzeros on mesh edges and the
// diagonal. The diagonal is the negative sum of the incident edge weights
// (accumulated in ascending-neighbor order), so row sums cancel exactly.
struct StiffnessMatrix {
  Eigen::VectorXd edge_weights;  // w_ij per canonical edge
  Eigen::VectorXd diagonal;      // w_ii per vertex
  Eigen::SparseMatrix<double> matrix;

  int size() const { return static_cast<int>(diagonal.size()); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

// Linear map translating functions on one shape (columns) to functions on
// another (rows); a point map t gives the 0/1 row selector f -> f(t(.)).
using FunctionalMap = Eigen::MatrixXd;

enum class ShapeDifferenceKind { area_based, conformal };

// Operator on functions of the source shape recording how an inner product
// changes under a functional map.
struct ShapeDifference {
  Eigen::MatrixXd matrix;
  ShapeDifferenceKind kind = ShapeDifferenceKind::area_based;
};

struct LbEigenBasis {
  Eigen::MatrixXd vectors;  // n x K, mass-orthonormal columns
  Eigen::VectorXd values;   // ascending, first is zero for connected meshes
};

// Inputs for spectrally truncating a functional map: the leading
// Laplace-Beltrami bases of both shapes and their mass diagonals.
struct SpectralTruncation {
  Eigen::MatrixXd basis_source;  // n x K
  Eigen::MatrixXd basis_target;  // m x K
  Eigen::VectorXd mass_source;   // n
  Eigen::VectorXd mass_target;   // m
};

struct MeshQualityReport {
  std::vector<int> negative_weight_edges;  // edges with w_ij < 0
  std::vector<int> obtuse_faces;           // faces with an intrinsically obtuse angle
  double min_slack = 0.0;                  // smallest triangle-inequality slack
  double min_rel_slack = 0.0;              // smallest slack / semi-perimeter
};

// Assembles a stiffness matrix from explicit per-edge weights; diagonal and
// sparse form are derived. Used by both weight constructions below.
StiffnessMatrix assemble_stiffness(const Mesh& mesh, const Eigen::VectorXd& edge_weights);

MassMatrix mass_matrix(const Mesh& mesh, const DiscreteMetric& metric);

// Length-based weights: each incident triangle ikj contributes
// (-l_ij^2 + l_jk^2 + l_ki^2) / (8 A_ikj) to w_ij.
StiffnessMatrix stiffness_matrix(const Mesh& mesh, const DiscreteMetric& metric);

// Angle-based cotangent weights (cot a + cot b)/2 computed from embedded
// coordinates. Agrees with stiffness_matrix on the induced metric; kept as
// an independent construction for cross-checking.
StiffnessMatrix cotan_stiffness_from_embedding(const Mesh& mesh, const Embedding& x);

// Moore-Penrose pseudoinverse of a symmetric matrix via dense
// eigendecomposition; eigenvalues with |l| <= rel_tol * max|l| are zeroed.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& sym, double rel_tol = kDefaultPinvRelTol);
Eigen::MatrixXd pseudoinverse(const StiffnessMatrix& w, double rel_tol = kDefaultPinvRelTol);

// Area-based difference: V = A_X^-1 F^T A_Y F.
ShapeDifference area_difference(const MassMatrix& mass_x, const MassMatrix& mass_y,
                                const FunctionalMap& f);

// Conformal difference: R = W_X^+ F^T W_Y F.
ShapeDifference conformal_difference(const StiffnessMatrix& stiff_x, const StiffnessMatrix& stiff_y,
                                     const FunctionalMap& f, double rel_tol = kDefaultPinvRelTol);

// Diagnostic: (1/2) sum_ij (w_ij(l) - wref_ij) l_ij^2 over edges.
// Sign-indefinite; zero when the reference weights match the metric's own.
double conformal_energy(const Mesh& mesh, const DiscreteMetric& metric,
                        const StiffnessMatrix& reference);

// First k eigenpairs of the generalized problem W phi = lambda A phi,
// ascending, with vectors normalized to Phi^T A Phi = I.
LbEigenBasis lb_eigenbasis(const Mesh& mesh, const DiscreteMetric& metric, int k);

// Row-selector map from a point map t (entries in [0,n)), optionally
// replaced by its rank-K spectral approximation
//   F_K = Phi_Y (Phi_Y^T A_Y F0 Phi_X) Phi_X^T A_X.
FunctionalMap functional_map_from_point_map(const std::vector<int>& point_map, int n,
                                            const std::optional<SpectralTruncation>& truncation = {});

// Negative cotangent weights, intrinsically obtuse faces, and the minimum
// triangle-inequality slack of a metric.
MeshQualityReport mesh_quality_report(const Mesh& mesh, const DiscreteMetric& metric);

}  // namespace sfo
