#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <vector>

#include <sfo/energy.hpp>

namespace sfo {

enum class SolverPhase { MfO, MDS };

// One inner iteration of either phase. Fields that do not apply to a phase
// hold NaN (energy on MDS rows, stress on MfO rows) or zero (mu, halvings
// on MDS rows).
struct TraceRecord {
  int outer_iter = 0;
  SolverPhase phase = SolverPhase::MfO;
  int inner_iter = 0;
  double energy = 0.0;
  double stress = 0.0;
  double mu = 0.0;
  int halvings = 0;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
};

struct SolverConfig {
  int outer_iterations = 20;
  int mfo_iterations = 5;
  int mds_iterations = 10;
  // Initial descent step; when unset, 1e-2 times the mean edge length of the
  // metric a descent starts from.
  std::optional<double> initial_step;
  int max_halvings = 40;
  double rel_margin = kDefaultRelMargin;
  // Relative per-outer-iteration improvement below which the alternation
  // stops early; 0 disables early exit.
  double energy_tolerance = 1e-8;
};

// Connectivity-only SMACOF system: the combinatorial graph Laplacian of the
// edge graph and its pseudoinverse, computed once per mesh.
struct SmacofSystem {
  Eigen::SparseMatrix<double> graph_laplacian;
  Eigen::MatrixXd pinv;
};

struct SmacofResult {
  Embedding embedding;
  std::vector<double> stress_trace;  // stress after each iteration
};

struct MfoResult {
  DiscreteMetric metric;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  std::vector<TraceRecord> records;
};

struct AlternateResult {
  Embedding embedding;
  SolverTrace trace;
  double initial_energy = 0.0;  // energy of the starting embedding's metric
  double final_energy = 0.0;    // energy of the returned embedding's metric
  int outer_iterations_run = 0;
};

// Sum over edges of (|x_i - x_j| - l_ij)^2.
double stress(const Mesh& mesh, const DiscreteMetric& metric, const Embedding& x);

// Throws DisconnectedMesh; the majorization pseudoinverse identities need a
// one-dimensional null space.
SmacofSystem smacof_matrices(const Mesh& mesh);

// One stress-majorization update X <- Z^+ B(X) X. Coincident endpoints
// contribute zero; the output is mean-centered because Z^+ annihilates
// constant columns.
Embedding smacof_step(const Mesh& mesh, const DiscreteMetric& metric, const Embedding& x,
                      const Eigen::MatrixXd& z_pinv);

// Fixed-count majorization; stress is non-increasing across iterations.
SmacofResult smacof(const Mesh& mesh, const DiscreteMetric& metric, const Embedding& x0,
                    int iterations);

// Safeguarded descent over edge lengths: each step halves mu from its
// initial value until the proposal both satisfies the strong triangle
// inequality at config.rel_margin and does not increase the energy. If
// max_halvings is exhausted the step is skipped and the metric kept.
MfoResult mfo_descent(const SfoEnergySpec& spec, const Mesh& mesh, const DiscreteMetric& initial,
                      const SolverConfig& config);

// Outer alternation: from the starting embedding, repeatedly (1) take the
// induced metric, (2) improve it by descent, (3) re-embed it by SMACOF
// warm-started at the current coordinates.
AlternateResult alternate(const SfoEnergySpec& spec, const Mesh& mesh, const Embedding& initial,
                          const SolverConfig& config);

}  // namespace sfo
