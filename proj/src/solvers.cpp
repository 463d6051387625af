#include <sfo/solvers.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sfo {

double stress(const Mesh& mesh, const DiscreteMetric& metric, const Embedding& x) {
  if (metric.lengths.size() != mesh.edge_count() || x.rows() != mesh.vertex_count)
    throw DimensionMismatch("stress: metric or embedding does not match the mesh");
  double total = 0.0;
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& [i, j] = mesh.edges[static_cast<std::size_t>(e)];
    const double d = (x.row(i) - x.row(j)).norm();
    const double r = d - metric.lengths[e];
    total += r * r;
  }
  return total;
}

SmacofSystem smacof_matrices(const Mesh& mesh) {
  if (!is_connected(mesh))
    throw DisconnectedMesh("SMACOF needs a connected mesh; the edge graph has several components");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * mesh.edge_count() + mesh.vertex_count));
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& [i, j] = mesh.edges[static_cast<std::size_t>(e)];
    triplets.emplace_back(i, j, -1.0);
    triplets.emplace_back(j, i, -1.0);
  }
  for (int v = 0; v < mesh.vertex_count; ++v)
    triplets.emplace_back(v, v, static_cast<double>(mesh.vertex_edges[static_cast<std::size_t>(v)].size()));
  SmacofSystem system;
  system.graph_laplacian.resize(mesh.vertex_count, mesh.vertex_count);
  system.graph_laplacian.setFromTriplets(triplets.begin(), triplets.end());
  system.pinv = pseudoinverse(Eigen::MatrixXd(system.graph_laplacian));
  return system;
}

Embedding smacof_step(const Mesh& mesh, const DiscreteMetric& metric, const Embedding& x,
                      const Eigen::MatrixXd& z_pinv) {
  if (x.rows() != mesh.vertex_count || x.cols() != 3 ||
      metric.lengths.size() != mesh.edge_count() || z_pinv.rows() != mesh.vertex_count)
    throw DimensionMismatch("smacof_step: inputs do not match the mesh");
  // (B(X) X)_i = sum_j (l_ij / d_ij) (x_i - x_j), with zero for coincident
  // endpoints.
  Eigen::MatrixXd bx = Eigen::MatrixXd::Zero(mesh.vertex_count, 3);
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& [i, j] = mesh.edges[static_cast<std::size_t>(e)];
    const Eigen::RowVector3d diff = x.row(i) - x.row(j);
    const double d = diff.norm();
    if (d == 0.0) continue;
    const Eigen::RowVector3d pull = (metric.lengths[e] / d) * diff;
    bx.row(i) += pull;
    bx.row(j) -= pull;
  }
  return z_pinv * bx;
}

SmacofResult smacof(const Mesh& mesh, const DiscreteMetric& metric, const Embedding& x0,
                    int iterations) {
  if (iterations < 1) throw InvalidArgument("smacof needs at least one iteration");
  const SmacofSystem system = smacof_matrices(mesh);
  SmacofResult result;
  result.embedding = x0;
  result.stress_trace.reserve(static_cast<std::size_t>(iterations));
  for (int k = 0; k < iterations; ++k) {
    result.embedding = smacof_step(mesh, metric, result.embedding, system.pinv);
    result.stress_trace.push_back(stress(mesh, metric, result.embedding));
  }
  return result;
}

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

double default_step(const DiscreteMetric& metric) { return 1e-2 * metric.lengths.mean(); }

}  // namespace

MfoResult mfo_descent(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& initial,
                      const SolverConfig& config) {
  if (config.mfo_iterations < 1 || config.max_halvings < 0 || config.rel_margin < 0.0)
    throw InvalidArgument("descent configuration out of range");
  if (!validate_metric(mesh, initial, 0.0).valid)
    throw InvalidInitialMetric("descent must start from a valid metric");

  const double mu0 = config.initial_step.value_or(default_step(initial));
  if (!(mu0 > 0.0)) throw InvalidArgument("initial step must be positive");

  MfoResult result;
  result.metric = initial;
  double energy = sfo_energy(spec, mesh, result.metric);
  result.initial_energy = energy;

  for (int k = 1; k <= config.mfo_iterations; ++k) {
    const EnergyGradient grad = sfo_gradient(spec, mesh, result.metric);
    double mu = mu0;
    int halvings = 0;
    bool accepted = false;
    DiscreteMetric proposal;
    double proposal_energy = 0.0;
    while (true) {
      proposal.lengths = result.metric.lengths - mu * grad;
      if (validate_metric(mesh, proposal, config.rel_margin).valid) {
        proposal_energy = sfo_energy(spec, mesh, proposal);
        if (proposal_energy <= energy) {
          accepted = true;
          break;
        }
      }
      if (halvings >= config.max_halvings) break;
      mu /= 2.0;
      ++halvings;
    }
    if (accepted) {
      result.metric = std::move(proposal);
      energy = proposal_energy;
    }
    result.records.push_back({0, SolverPhase::MfO, k, energy, kNan, accepted ? mu : 0.0, halvings});
  }
  result.final_energy = energy;
  return result;
}

AlternateResult alternate(const SfoEnergySpec& spec, const Mesh& mesh, const Embedding& initial,
                          const SolverConfig& config) {
  if (config.outer_iterations < 1 || config.mds_iterations < 1)
    throw InvalidArgument("iteration counts must be at least 1");
  const SmacofSystem system = smacof_matrices(mesh);

  AlternateResult result;
  result.embedding = initial;
  result.initial_energy = kNan;
  double previous_phase_energy = kNan;

  for (int outer = 1; outer <= config.outer_iterations; ++outer) {
    DiscreteMetric metric = metric_from_embedding(mesh, result.embedding);
    MfoResult mfo = mfo_descent(spec, mesh, metric, config);
    if (outer == 1) result.initial_energy = mfo.initial_energy;
    for (TraceRecord record : mfo.records) {
      record.outer_iter = outer;
      result.trace.records.push_back(record);
    }
    metric = std::move(mfo.metric);

    for (int k = 1; k <= config.mds_iterations; ++k) {
      result.embedding = smacof_step(mesh, metric, result.embedding, system.pinv);
      result.trace.records.push_back({outer, SolverPhase::MDS, k, kNan,
                                      stress(mesh, metric, result.embedding), 0.0, 0});
    }
    result.outer_iterations_run = outer;

    if (config.energy_tolerance > 0.0 && outer >= 2) {
      const double improvement = previous_phase_energy - mfo.final_energy;
      const double scale = std::max(previous_phase_energy, std::numeric_limits<double>::min());
      if (improvement < config.energy_tolerance * scale) break;
    }
    previous_phase_energy = mfo.final_energy;
  }

  try {
    result.final_energy = sfo_energy(spec, mesh, metric_from_embedding(mesh, result.embedding));
  } catch (const Error&) {
    result.final_energy = kNan;
  }
  return result;
}

}  // namespace sfo
