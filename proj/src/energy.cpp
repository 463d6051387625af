#include <sfo/energy.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace sfo {

namespace {

void check_term(const SfoTerm& term, int n, const char* name) {
  if (term.h.cols() != n)
    throw DimensionMismatch(std::string(name) + ": H has " + std::to_string(term.h.cols()) +
                            " columns, mesh has " + std::to_string(n) + " vertices");
  if (term.k.rows() != n)
    throw DimensionMismatch(std::string(name) + ": K has " + std::to_string(term.k.rows()) +
                            " rows, mesh has " + std::to_string(n) + " vertices");
  if (term.j.rows() != term.h.rows() || term.j.cols() != term.k.cols())
    throw DimensionMismatch(std::string(name) + ": J must be " + std::to_string(term.h.rows()) +
                            "x" + std::to_string(term.k.cols()) + ", got " +
                            std::to_string(term.j.rows()) + "x" + std::to_string(term.j.cols()));
}

void check_spec(const SfoEnergySpec& spec, int n) {
  if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0))
    throw InvalidArgument("lambda must lie in [0,1], got " + std::to_string(spec.lambda));
  if (spec.lambda > 0.0 && !spec.area_term)
    throw InvalidArgument("area term required when lambda > 0");
  if (spec.lambda < 1.0 && !spec.stiffness_term)
    throw InvalidArgument("stiffness term required when lambda < 1");
  if (spec.area_term) check_term(*spec.area_term, n, "area term");
  if (spec.stiffness_term) check_term(*spec.stiffness_term, n, "stiffness term");
}

void require_valid(const Mesh& mesh, const DiscreteMetric& metric) {
  const MetricValidity validity = validate_metric(mesh, metric, 0.0);
  if (!validity.valid)
    throw InvalidMetric("metric violates the strict triangle inequality on " +
                        std::to_string(validity.violations.size()) + " face(s)");
}

}  // namespace

double sfo_energy(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& metric) {
  check_spec(spec, mesh.vertex_count);
  require_valid(mesh, metric);
  double total = 0.0;
  if (spec.lambda > 0.0) {
    const SfoTerm& t = *spec.area_term;
    const MassMatrix mass = mass_matrix(mesh, metric);
    const Eigen::MatrixXd residual = t.h * (mass.diag.asDiagonal() * t.k) - t.j;
    total += spec.lambda * residual.squaredNorm();
  }
  if (spec.lambda < 1.0) {
    const SfoTerm& t = *spec.stiffness_term;
    const StiffnessMatrix w = stiffness_matrix(mesh, metric);
    const Eigen::MatrixXd residual = t.h * (w.matrix * t.k) - t.j;
    total += (1.0 - spec.lambda) * residual.squaredNorm();
  }
  return total;
}

std::array<double, 3> area_partials(double a, double b, double c) {
  const double area = triangle_area(a, b, c);
  const double s = (a + b + c) / 2.0;
  const auto gamma = [&](double x, double y, double z) {
    return ((s - x) * (s - y) * (s - z) + s * (s - x) * (s - y) + s * (s - x) * (s - z) -
            s * (s - y) * (s - z)) /
           (4.0 * area);
  };
  return {gamma(a, b, c), gamma(b, a, c), gamma(c, a, b)};
}

Eigen::SparseMatrix<double> mass_partials(const Mesh& mesh, const DiscreteMetric& metric) {
  require_valid(mesh, metric);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(9 * mesh.face_count()));
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    const auto grad = area_partials(metric.lengths[fe[0]], metric.lengths[fe[1]], metric.lengths[fe[2]]);
    for (int side = 0; side < 3; ++side)
      for (int v : mesh.faces[static_cast<std::size_t>(f)])
        triplets.emplace_back(v, fe[side], grad[static_cast<std::size_t>(side)] / 3.0);
  }
  Eigen::SparseMatrix<double> result(mesh.vertex_count, mesh.edge_count());
  result.setFromTriplets(triplets.begin(), triplets.end());
  return result;
}

Eigen::SparseMatrix<double> stiffness_partials(const Mesh& mesh, const DiscreteMetric& metric) {
  require_valid(mesh, metric);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(9 * mesh.face_count()));
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    const double len[3] = {metric.lengths[fe[0]], metric.lengths[fe[1]], metric.lengths[fe[2]]};
    const double area = triangle_area(len[0], len[1], len[2]);
    const auto d_area = area_partials(len[0], len[1], len[2]);
    // Face contribution to the weight of its own edge `side`:
    //   c = (-x^2 + y^2 + z^2) / (8 A), x the edge itself.
    // Quotient rule against the three lengths of this face.
    for (int side = 0; side < 3; ++side) {
      const double x = len[side];
      const double y = len[(side + 1) % 3];
      const double z = len[(side + 2) % 3];
      const double contribution = (-x * x + y * y + z * z) / (8.0 * area);
      for (int other = 0; other < 3; ++other) {
        const double numerator = (other == side) ? -len[other] : len[other];
        const double partial =
            numerator / (4.0 * area) - contribution * d_area[static_cast<std::size_t>(other)] / area;
        triplets.emplace_back(fe[side], fe[other], partial);
      }
    }
  }
  Eigen::SparseMatrix<double> result(mesh.edge_count(), mesh.edge_count());
  result.setFromTriplets(triplets.begin(), triplets.end());
  return result;
}

EnergyGradient sfo_gradient(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& metric) {
  check_spec(spec, mesh.vertex_count);
  require_valid(mesh, metric);
  EnergyGradient grad = EnergyGradient::Zero(mesh.edge_count());

  if (spec.lambda > 0.0) {
    const SfoTerm& t = *spec.area_term;
    const MassMatrix mass = mass_matrix(mesh, metric);
    const Eigen::MatrixXd residual = t.h * (mass.diag.asDiagonal() * t.k) - t.j;
    // Only the diagonal of the outer factor 2 H^T R K^T is needed since the
    // mass matrix is diagonal.
    const Eigen::MatrixXd lifted = t.h.transpose() * residual;  // n x l
    const Eigen::VectorXd sensitivity = 2.0 * lifted.cwiseProduct(t.k).rowwise().sum();
    grad += spec.lambda * (mass_partials(mesh, metric).transpose() * sensitivity);
  }

  if (spec.lambda < 1.0) {
    const SfoTerm& t = *spec.stiffness_term;
    const StiffnessMatrix w = stiffness_matrix(mesh, metric);
    const Eigen::MatrixXd residual = t.h * (w.matrix * t.k) - t.j;
    const Eigen::MatrixXd outer = 2.0 * t.h.transpose() * residual * t.k.transpose();  // n x n
    // One edge weight w_ij touches the matrix at (i,j), (j,i) and, through
    // the zero-row-sum diagonal, at (i,i) and (j,j).
    Eigen::VectorXd sensitivity(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
      const auto& [i, j] = mesh.edges[static_cast<std::size_t>(e)];
      sensitivity[e] = outer(i, j) + outer(j, i) - outer(i, i) - outer(j, j);
    }
    grad += (1.0 - spec.lambda) * (stiffness_partials(mesh, metric).transpose() * sensitivity);
  }
  return grad;
}

SfoEnergySpec make_shape_from_laplacian_spec(const FunctionalMap& f,
                                             const Eigen::MatrixXd& target_stiffness) {
  if (target_stiffness.rows() != target_stiffness.cols())
    throw DimensionMismatch("target stiffness must be square, got " +
                            std::to_string(target_stiffness.rows()) + "x" +
                            std::to_string(target_stiffness.cols()));
  if (target_stiffness.cols() != f.rows())
    throw DimensionMismatch("target stiffness is " + std::to_string(target_stiffness.rows()) +
                            "x" + std::to_string(target_stiffness.cols()) +
                            " but the functional map has " + std::to_string(f.rows()) + " rows");
  SfoEnergySpec spec;
  spec.lambda = 0.0;
  SfoTerm term;
  term.h = Eigen::MatrixXd::Identity(f.rows(), f.rows());
  term.k = f;
  term.j = target_stiffness * f;
  spec.stiffness_term = std::move(term);
  return spec;
}

SfoEnergySpec make_shape_from_difference_spec(const MassMatrix& mass_c,
                                              const StiffnessMatrix& stiffness_c,
                                              const FunctionalMap& g, const ShapeDifference& area_diff,
                                              const ShapeDifference& conformal_diff, double lambda,
                                              double rel_tol) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidArgument("lambda must lie in [0,1], got " + std::to_string(lambda));
  const int n = mass_c.size();
  if (stiffness_c.size() != n)
    throw DimensionMismatch("mass and stiffness of the synthesis mesh disagree in size");
  if (g.rows() != n)
    throw DimensionMismatch("functional map has " + std::to_string(g.rows()) +
                            " rows, synthesis mesh has " + std::to_string(n) + " vertices");
  const auto check_square = [&](const Eigen::MatrixXd& d, const char* name) {
    if (d.rows() != d.cols() || d.rows() != g.cols())
      throw DimensionMismatch(std::string(name) + " must be " + std::to_string(g.cols()) + "x" +
                              std::to_string(g.cols()) + ", got " + std::to_string(d.rows()) +
                              "x" + std::to_string(d.cols()));
  };

  SfoEnergySpec spec;
  spec.lambda = lambda;
  if (lambda > 0.0) {
    check_square(area_diff.matrix, "area difference");
    SfoTerm term;
    term.h = Eigen::MatrixXd(mass_c.diag.cwiseInverse().asDiagonal());
    term.k = g;
    term.j = g * area_diff.matrix;
    spec.area_term = std::move(term);
  }
  if (lambda < 1.0) {
    check_square(conformal_diff.matrix, "conformal difference");
    SfoTerm term;
    term.h = pseudoinverse(stiffness_c, rel_tol);
    term.k = g;
    term.j = g * conformal_diff.matrix;
    spec.stiffness_term = std::move(term);
  }
  return spec;
}

Eigen::VectorXd per_vertex_energy(const SfoEnergySpec& spec, const Mesh& mesh,
                                  const DiscreteMetric& metric) {
  check_spec(spec, mesh.vertex_count);
  require_valid(mesh, metric);
  const int n = mesh.vertex_count;
  Eigen::VectorXd result = Eigen::VectorXd::Zero(n);
  const auto accumulate = [&](const Eigen::MatrixXd& residual, double weight) {
    if (residual.rows() != n || residual.cols() != n)
      throw ShapeMismatch("vertex energies need square residuals; got " +
                          std::to_string(residual.rows()) + "x" + std::to_string(residual.cols()));
    const Eigen::MatrixXd abs = residual.cwiseAbs();
    result += weight * (abs.rowwise().sum() + abs.colwise().sum().transpose());
  };
  if (spec.lambda > 0.0) {
    const SfoTerm& t = *spec.area_term;
    const MassMatrix mass = mass_matrix(mesh, metric);
    accumulate(t.h * (mass.diag.asDiagonal() * t.k) - t.j, spec.lambda);
  }
  if (spec.lambda < 1.0) {
    const SfoTerm& t = *spec.stiffness_term;
    const StiffnessMatrix w = stiffness_matrix(mesh, metric);
    accumulate(t.h * (w.matrix * t.k) - t.j, 1.0 - spec.lambda);
  }
  return result;
}

}  // namespace sfo
