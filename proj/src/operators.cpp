#include <sfo/operators.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace sfo {

StiffnessMatrix assemble_stiffness(const Mesh& mesh, const Eigen::VectorXd& edge_weights) {
  if (edge_weights.size() != mesh.edge_count())
    throw DimensionMismatch("expected " + std::to_string(mesh.edge_count()) +
                            " edge weights, got " + std::to_string(edge_weights.size()));
  StiffnessMatrix w;
  w.edge_weights = edge_weights;
  w.diagonal = Eigen::VectorXd::Zero(mesh.vertex_count);
  // vertex_edges is ascending, so each diagonal entry is the exact negation
  // of the off-diagonal row sum taken in ascending-column order.
  for (int v = 0; v < mesh.vertex_count; ++v)
    for (int e : mesh.vertex_edges[static_cast<std::size_t>(v)]) w.diagonal[v] -= edge_weights[e];

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * mesh.edge_count() + mesh.vertex_count));
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& [i, j] = mesh.edges[static_cast<std::size_t>(e)];
    triplets.emplace_back(i, j, edge_weights[e]);
    triplets.emplace_back(j, i, edge_weights[e]);
  }
  for (int v = 0; v < mesh.vertex_count; ++v) triplets.emplace_back(v, v, w.diagonal[v]);
  w.matrix.resize(mesh.vertex_count, mesh.vertex_count);
  w.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

MassMatrix mass_matrix(const Mesh& mesh, const DiscreteMetric& metric) {
  const Eigen::VectorXd areas = face_areas(mesh, metric);
  MassMatrix mass;
  mass.diag = Eigen::VectorXd::Zero(mesh.vertex_count);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const double third = areas[f] / 3.0;
    for (int v : mesh.faces[static_cast<std::size_t>(f)]) mass.diag[v] += third;
  }
  return mass;
}

StiffnessMatrix stiffness_matrix(const Mesh& mesh, const DiscreteMetric& metric) {
  const Eigen::VectorXd areas = face_areas(mesh, metric);
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(mesh.edge_count());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    const double a = metric.lengths[fe[0]];
    const double b = metric.lengths[fe[1]];
    const double c = metric.lengths[fe[2]];
    const double scale = 1.0 / (8.0 * areas[f]);
    weights[fe[0]] += (-a * a + b * b + c * c) * scale;
    weights[fe[1]] += (-b * b + c * c + a * a) * scale;
    weights[fe[2]] += (-c * c + a * a + b * b) * scale;
  }
  return assemble_stiffness(mesh, weights);
}

StiffnessMatrix cotan_stiffness_from_embedding(const Mesh& mesh, const Embedding& x) {
  if (x.rows() != mesh.vertex_count || x.cols() != 3)
    throw DimensionMismatch("embedding must be " + std::to_string(mesh.vertex_count) + "x3");
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(mesh.edge_count());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& [i, j, k] = mesh.faces[static_cast<std::size_t>(f)];
    const Eigen::Vector3d xi = x.row(i), xj = x.row(j), xk = x.row(k);
    // Corner v contributes cot(angle at v)/2 to the opposite edge.
    const auto corner = [&](const Eigen::Vector3d& apex, const Eigen::Vector3d& p,
                            const Eigen::Vector3d& q, int edge) {
      const Eigen::Vector3d u = p - apex;
      const Eigen::Vector3d v = q - apex;
      const double cross = u.cross(v).norm();
      if (cross == 0.0)
        throw DegenerateTriangle("face " + std::to_string(f) + " is degenerate when embedded");
      weights[edge] += 0.5 * u.dot(v) / cross;
    };
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    corner(xk, xi, xj, fe[0]);  // angle at k, opposite edge ij
    corner(xi, xj, xk, fe[1]);  // angle at i, opposite edge jk
    corner(xj, xk, xi, fe[2]);  // angle at j, opposite edge ki
  }
  return assemble_stiffness(mesh, weights);
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& sym, double rel_tol) {
  if (sym.rows() != sym.cols())
    throw DimensionMismatch("pseudoinverse expects a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw EigensolverFailure("symmetric eigendecomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double cutoff = rel_tol * values.cwiseAbs().maxCoeff();
  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) > cutoff) inverted[i] = 1.0 / values[i];
  return solver.eigenvectors() * inverted.asDiagonal() * solver.eigenvectors().transpose();
}

Eigen::MatrixXd pseudoinverse(const StiffnessMatrix& w, double rel_tol) {
  return pseudoinverse(w.dense(), rel_tol);
}

ShapeDifference area_difference(const MassMatrix& mass_x, const MassMatrix& mass_y,
                                const FunctionalMap& f) {
  if (f.cols() != mass_x.size() || f.rows() != mass_y.size())
    throw DimensionMismatch("functional map is " + std::to_string(f.rows()) + "x" +
                            std::to_string(f.cols()) + " but masses have sizes " +
                            std::to_string(mass_y.size()) + " and " + std::to_string(mass_x.size()));
  const Eigen::MatrixXd inner = f.transpose() * (mass_y.diag.asDiagonal() * f);
  ShapeDifference diff;
  // Row-wise division (not reciprocal multiply) so the self-difference with
  // an identity map is exactly the identity matrix.
  diff.matrix = inner.array().colwise() / mass_x.diag.array();
  diff.kind = ShapeDifferenceKind::area_based;
  return diff;
}

ShapeDifference conformal_difference(const StiffnessMatrix& stiff_x, const StiffnessMatrix& stiff_y,
                                     const FunctionalMap& f, double rel_tol) {
  if (f.cols() != stiff_x.size() || f.rows() != stiff_y.size())
    throw DimensionMismatch("functional map is " + std::to_string(f.rows()) + "x" +
                            std::to_string(f.cols()) + " but stiffness sizes are " +
                            std::to_string(stiff_y.size()) + " and " + std::to_string(stiff_x.size()));
  ShapeDifference diff;
  diff.matrix = pseudoinverse(stiff_x, rel_tol) * (f.transpose() * (stiff_y.matrix * f));
  diff.kind = ShapeDifferenceKind::conformal;
  return diff;
}

double conformal_energy(const Mesh& mesh, const DiscreteMetric& metric,
                        const StiffnessMatrix& reference) {
  if (reference.edge_weights.size() != mesh.edge_count())
    throw DimensionMismatch("reference stiffness does not match the mesh edge count");
  const StiffnessMatrix w = stiffness_matrix(mesh, metric);
  double energy = 0.0;
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const double l = metric.lengths[e];
    energy += 0.5 * (w.edge_weights[e] - reference.edge_weights[e]) * l * l;
  }
  return energy;
}

LbEigenBasis lb_eigenbasis(const Mesh& mesh, const DiscreteMetric& metric, int k) {
  if (k < 1 || k > mesh.vertex_count)
    throw InvalidArgument("eigenbasis size " + std::to_string(k) + " outside [1, " +
                          std::to_string(mesh.vertex_count) + "]");
  const StiffnessMatrix w = stiffness_matrix(mesh, metric);
  const MassMatrix mass = mass_matrix(mesh, metric);
  const Eigen::MatrixXd a = Eigen::MatrixXd(mass.diag.asDiagonal());
  // With positive cotangent weights off the diagonal, the quadratic form
  // f^T W f equals minus the Dirichlet energy; the Laplace-Beltrami spectrum
  // (nonnegative, ascending, constant first eigenfunction) belongs to -W.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(-w.dense()), a);
  if (solver.info() != Eigen::Success)
    throw EigensolverFailure("generalized eigendecomposition failed");
  LbEigenBasis basis;
  basis.vectors = solver.eigenvectors().leftCols(k);
  basis.values = solver.eigenvalues().head(k);
  return basis;
}

FunctionalMap functional_map_from_point_map(const std::vector<int>& point_map, int n,
                                            const std::optional<SpectralTruncation>& truncation) {
  const int m = static_cast<int>(point_map.size());
  for (int y = 0; y < m; ++y)
    if (point_map[static_cast<std::size_t>(y)] < 0 || point_map[static_cast<std::size_t>(y)] >= n)
      throw IndexOutOfRange("point map entry " + std::to_string(y) + " targets vertex " +
                            std::to_string(point_map[static_cast<std::size_t>(y)]) +
                            " outside [0, " + std::to_string(n) + ")");
  if (!truncation) {
    FunctionalMap f0 = Eigen::MatrixXd::Zero(m, n);
    for (int y = 0; y < m; ++y) f0(y, point_map[static_cast<std::size_t>(y)]) = 1.0;
    return f0;
  }

  const auto& tr = *truncation;
  if (tr.basis_source.rows() != n || tr.mass_source.size() != n ||
      tr.basis_target.rows() != m || tr.mass_target.size() != m ||
      tr.basis_source.cols() != tr.basis_target.cols())
    throw DimensionMismatch("spectral truncation bases do not match the point map sizes");
  // Selector composed with the source basis: row y picks basis row t(y).
  Eigen::MatrixXd pushed(m, tr.basis_source.cols());
  for (int y = 0; y < m; ++y) pushed.row(y) = tr.basis_source.row(point_map[static_cast<std::size_t>(y)]);
  const Eigen::MatrixXd coeff = tr.basis_target.transpose() * (tr.mass_target.asDiagonal() * pushed);
  return tr.basis_target * coeff * tr.basis_source.transpose() * tr.mass_source.asDiagonal();
}

MeshQualityReport mesh_quality_report(const Mesh& mesh, const DiscreteMetric& metric) {
  const StiffnessMatrix w = stiffness_matrix(mesh, metric);
  MeshQualityReport report;
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (w.edge_weights[e] < 0.0) report.negative_weight_edges.push_back(e);

  report.min_slack = std::numeric_limits<double>::infinity();
  report.min_rel_slack = std::numeric_limits<double>::infinity();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    const double a = metric.lengths[fe[0]];
    const double b = metric.lengths[fe[1]];
    const double c = metric.lengths[fe[2]];
    if (a * a > b * b + c * c || b * b > c * c + a * a || c * c > a * a + b * b)
      report.obtuse_faces.push_back(f);
    const double slack = std::min({a + b - c, b + c - a, c + a - b});
    const double s = (a + b + c) / 2.0;
    report.min_slack = std::min(report.min_slack, slack);
    report.min_rel_slack = std::min(report.min_rel_slack, slack / s);
  }
  return report;
}

}  // namespace sfo
