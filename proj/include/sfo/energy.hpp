#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <optional>

#include <sfo/operators.hpp>

namespace sfo {

// One Frobenius term || H Q(l) K - J ||_F^2, with Q the mass or stiffness
// operator of the optimized metric.
struct SfoTerm {
  Eigen::MatrixXd h;  // m x n
  Eigen::MatrixXd k;  // n x l
  Eigen::MatrixXd j;  // m x l
};

// Weighted two-term objective
//   E(l) = lambda ||H1 A(l) K1 - J1||_F^2 + (1-lambda) ||H2 W(l) K2 - J2||_F^2.
// A term may be absent when its weight is zero.
struct SfoEnergySpec {
  double lambda = 0.5;
  std::optional<SfoTerm> area_term;
  std::optional<SfoTerm> stiffness_term;
};

// Gradient with respect to the edge lengths, canonical edge order.
using EnergyGradient = Eigen::VectorXd;

double sfo_energy(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& metric);

// Partials of the Heron area with respect to the three side lengths (a,b,c).
std::array<double, 3> area_partials(double a, double b, double c);

// Sparse n x |E| matrix of dA_vertex/dl_edge: entry (i,e) is the derivative
// of the lumped vertex area a_i with respect to edge length l_e.
Eigen::SparseMatrix<double> mass_partials(const Mesh& mesh, const DiscreteMetric& metric);

// Sparse |E| x |E| matrix of off-diagonal weight partials: entry (p,e) is
// dw_p/dl_e. Each weight depends only on the lengths of its two incident
// triangles, so columns have at most five nonzeros. Diagonal stiffness
// partials follow from the zero-row-sum identity.
Eigen::SparseMatrix<double> stiffness_partials(const Mesh& mesh, const DiscreteMetric& metric);

// Analytic dE/dl assembled by contracting the residual outer factors against
// the sparse operator partials; never materializes the n^2 x |E| Jacobian.
EnergyGradient sfo_gradient(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& metric);

// Stiffness-only spec ||W(l) F - W_B F||_F^2: lambda = 0, H2 = I, K2 = F,
// J2 = W_B F. W_B must be square with F.rows() columns.
SfoEnergySpec make_shape_from_laplacian_spec(const FunctionalMap& f, const Eigen::MatrixXd& target_stiffness);

// Difference-matching spec with H1 = A_C^-1, H2 = W_C^+, K1 = K2 = G,
// J1 = G V_AB, J2 = G R_AB.
SfoEnergySpec make_shape_from_difference_spec(const MassMatrix& mass_c, const StiffnessMatrix& stiffness_c,
                                              const FunctionalMap& g, const ShapeDifference& area_diff,
                                              const ShapeDifference& conformal_diff, double lambda,
                                              double rel_tol = kDefaultPinvRelTol);

// Vertex-wise attribution of the residual energy:
//   eps_i = lambda sum_j (|e_ij| + |e_ji|) + (1-lambda) sum_j (|e'_ij| + |e'_ji|).
// Requires square n x n residuals; throws ShapeMismatch otherwise.
Eigen::VectorXd per_vertex_energy(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& metric);

}  // namespace sfo
