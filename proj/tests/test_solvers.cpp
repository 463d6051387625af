#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include <sfo/solvers.hpp>

#include "oracles.hpp"
#include "test_meshes.hpp"

using namespace sfo;

namespace {

SfoEnergySpec self_laplacian_spec(const Mesh& mesh, const DiscreteMetric& target) {
  const StiffnessMatrix w = stiffness_matrix(mesh, target);
  return make_shape_from_laplacian_spec(
      Eigen::MatrixXd::Identity(mesh.vertex_count, mesh.vertex_count), w.dense());
}

}  // namespace

TEST_CASE("stress") {
  const auto shape = testmesh::tetrahedron(1.0);
  const DiscreteMetric metric = metric_from_embedding(shape.mesh, shape.embedding);

  SUBCASE("zero at an exact realization") {
    CHECK(stress(shape.mesh, metric, shape.embedding) == 0.0);
  }

  SUBCASE("matches a direct summation after perturbation") {
    std::mt19937_64 rng(97);
    const Embedding moved = testmesh::perturb(shape.embedding, 0.05, rng);
    double expected = 0.0;
    for (int e = 0; e < shape.mesh.edge_count(); ++e) {
      const auto& [i, j] = shape.mesh.edges[e];
      const double d = (moved.row(i) - moved.row(j)).norm();
      expected += (d - metric.lengths[e]) * (d - metric.lengths[e]);
    }
    CHECK(stress(shape.mesh, metric, moved) == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("rigid-motion invariant") {
    Eigen::Matrix3d rot(Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 1, 0).normalized()));
    Embedding moved = shape.embedding * rot.transpose();
    moved.rowwise() += Eigen::RowVector3d(0.3, -2.0, 1.0);
    CHECK(stress(shape.mesh, metric, moved) < 1e-24);
  }
}

TEST_CASE("smacof system matrices") {
  const auto shape = testmesh::tetrahedron(1.0);
  const SmacofSystem system = smacof_matrices(shape.mesh);
  const Eigen::MatrixXd z(system.graph_laplacian);
  const int n = 4;

  // Complete graph on four vertices: degree 3, off-diagonal -1.
  CHECK((z - (4.0 * Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Ones(n, n)))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((z * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd projector =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  CHECK((system.pinv * z - projector).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((z * system.pinv - projector).cwiseAbs().maxCoeff() < 1e-10);
  // Explicit pseudoinverse of the K4 Laplacian.
  CHECK((system.pinv - 0.25 * projector).cwiseAbs().maxCoeff() < 1e-12);

  const auto larger = testmesh::icosphere(1);
  const SmacofSystem big = smacof_matrices(larger.mesh);
  const Eigen::MatrixXd zp(big.graph_laplacian);
  const int m = larger.mesh.vertex_count;
  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(m, m) - Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  CHECK((big.pinv * zp - proj).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((zp * big.pinv - proj).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("smacof rejects disconnected meshes") {
  std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}};
  const auto copy = faces;
  for (const auto& f : copy) faces.push_back({f[0] + 4, f[1] + 4, f[2] + 4});
  const Mesh two = build_mesh(8, faces);
  CHECK_THROWS_AS(smacof_matrices(two), DisconnectedMesh);
}

TEST_CASE("smacof step") {
  const auto shape = testmesh::tetrahedron(1.0);
  const DiscreteMetric metric = metric_from_embedding(shape.mesh, shape.embedding);
  const SmacofSystem system = smacof_matrices(shape.mesh);

  SUBCASE("exact realization is a fixed point up to centering") {
    const Embedding next = smacof_step(shape.mesh, metric, shape.embedding, system.pinv);
    Embedding centered = shape.embedding;
    centered.rowwise() -= shape.embedding.colwise().mean();
    CHECK((next - centered).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(stress(shape.mesh, metric, next) < 1e-24);
  }

  SUBCASE("output is mean-centered") {
    std::mt19937_64 rng(101);
    const Embedding x0 = testmesh::random_embedding(4, rng);
    const Embedding next = smacof_step(shape.mesh, metric, x0, system.pinv);
    CHECK(next.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("coincident points are handled") {
    Embedding x0 = shape.embedding;
    x0.row(1) = x0.row(0);
    const Embedding next = smacof_step(shape.mesh, metric, x0, system.pinv);
    CHECK(next.allFinite());
  }

  SUBCASE("all-coincident input stays finite") {
    const Embedding x0 = Embedding::Zero(4, 3);
    const Embedding next = smacof_step(shape.mesh, metric, x0, system.pinv);
    CHECK(next.allFinite());
  }
}

TEST_CASE("smacof stress monotonicity over random trials") {
  std::mt19937_64 rng(103);
  const auto shapes = {testmesh::octahedron(), testmesh::bipyramid(10), testmesh::torus(5, 4)};
  for (const auto& shape : shapes) {
    const SmacofSystem system = smacof_matrices(shape.mesh);
    const DiscreteMetric induced = metric_from_embedding(shape.mesh, shape.embedding);
    for (int trial = 0; trial < 60; ++trial) {
      const DiscreteMetric metric = testmesh::random_valid_metric(shape.mesh, induced, 0.2, rng);
      Embedding x = testmesh::random_embedding(shape.mesh.vertex_count, rng);
      double previous = stress(shape.mesh, metric, x);
      for (int k = 0; k < 8; ++k) {
        x = smacof_step(shape.mesh, metric, x, system.pinv);
        const double current = stress(shape.mesh, metric, x);
        CHECK(current <= previous + 1e-12 * (1.0 + previous));
        previous = current;
      }
    }
  }
}

TEST_CASE("smacof recovers the tetrahedron metric from a random start") {
  std::mt19937_64 rng(107);
  const auto shape = testmesh::tetrahedron(1.0);
  const DiscreteMetric metric = metric_from_embedding(shape.mesh, shape.embedding);
  const Embedding x0 = testmesh::random_embedding(4, rng);
  const SmacofResult result = smacof(shape.mesh, metric, x0, 200);
  CHECK(result.stress_trace.size() == 200);
  CHECK(result.stress_trace.back() < 1e-6);
}

TEST_CASE("smacof trace length and monotonicity") {
  std::mt19937_64 rng(109);
  const auto shape = testmesh::octahedron();
  const DiscreteMetric metric = metric_from_embedding(shape.mesh, shape.embedding);
  const Embedding x0 = testmesh::perturb(shape.embedding, 0.2, rng);
  const SmacofResult result = smacof(shape.mesh, metric, x0, 10);
  CHECK(result.stress_trace.size() == 10);
  for (std::size_t k = 1; k < result.stress_trace.size(); ++k)
    CHECK(result.stress_trace[k] <= result.stress_trace[k - 1] + 1e-12 * (1.0 + result.stress_trace[k - 1]));

  const SmacofResult perfect = smacof(shape.mesh, metric, shape.embedding, 5);
  for (double s : perfect.stress_trace) CHECK(s <= 1e-12);
}

TEST_CASE("mfo descent at a global minimum keeps the metric") {
  const auto shape = testmesh::octahedron();
  const DiscreteMetric metric = metric_from_embedding(shape.mesh, shape.embedding);
  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, metric);
  SolverConfig config;
  config.mfo_iterations = 5;
  const MfoResult result = mfo_descent(spec, shape.mesh, metric, config);
  CHECK(result.initial_energy == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(result.final_energy <= 1e-18);
  CHECK((result.metric.lengths - metric.lengths).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mfo descent reduces a near-target stiffness mismatch") {
  std::mt19937_64 rng(113);
  const auto shape = testmesh::icosphere(1);
  const DiscreteMetric start = metric_from_embedding(shape.mesh, shape.embedding);
  DiscreteMetric target;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  target.lengths = start.lengths;
  for (Eigen::Index e = 0; e < target.lengths.size(); ++e)
    target.lengths[e] *= 1.0 + 0.05 * uniform(rng);
  REQUIRE(validate_metric(shape.mesh, target, 1e-7).valid);

  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, target);
  SolverConfig config;
  config.mfo_iterations = 50;
  const MfoResult result = mfo_descent(spec, shape.mesh, start, config);
  CHECK(result.final_energy <= 0.1 * result.initial_energy);

  double previous = result.initial_energy;
  for (const TraceRecord& record : result.records) {
    CHECK(record.energy <= previous);
    previous = record.energy;
  }
}

TEST_CASE("mfo descent never accepts an invalid metric") {
  std::mt19937_64 rng(127);
  const auto shape = testmesh::bipyramid(8);
  const DiscreteMetric start = metric_from_embedding(shape.mesh, shape.embedding);
  DiscreteMetric target;
  target.lengths = 1.3 * start.lengths;
  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, target);

  SolverConfig config;
  config.mfo_iterations = 10;
  config.initial_step = 1e4;  // adversarial: forces halvings
  const MfoResult result = mfo_descent(spec, shape.mesh, start, config);
  CHECK(validate_metric(shape.mesh, result.metric, config.rel_margin).valid);
  for (const TraceRecord& record : result.records) CHECK(record.halvings >= 0);
}

TEST_CASE("mfo descent rejects an invalid initial metric") {
  const auto shape = testmesh::tetrahedron(1.0);
  DiscreteMetric bad;
  bad.lengths = Eigen::VectorXd::Ones(6);
  bad.lengths[0] = 3.0;
  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, metric_from_embedding(shape.mesh, shape.embedding));
  CHECK_THROWS_AS(mfo_descent(spec, shape.mesh, bad, SolverConfig{}), InvalidInitialMetric);
}

TEST_CASE("solver configuration defaults") {
  const SolverConfig config;
  CHECK(config.outer_iterations == 20);
  CHECK(config.mfo_iterations == 5);
  CHECK(config.mfo_iterations >= 1);
  CHECK(config.mfo_iterations <= 10);
  CHECK(config.mds_iterations == 10);
  CHECK_FALSE(config.initial_step.has_value());
  CHECK(config.max_halvings == 40);
  CHECK(config.rel_margin == 1e-7);
  CHECK(config.energy_tolerance == 1e-8);
  CHECK(SfoEnergySpec{}.lambda == 0.5);
}

TEST_CASE("alternation on the identity problem stays at the input") {
  const auto shape = testmesh::icosphere(1);
  const int n = shape.mesh.vertex_count;
  const DiscreteMetric metric = metric_from_embedding(shape.mesh, shape.embedding);
  const MassMatrix mass = mass_matrix(shape.mesh, metric);
  const StiffnessMatrix w = stiffness_matrix(shape.mesh, metric);
  const FunctionalMap identity = Eigen::MatrixXd::Identity(n, n);
  const ShapeDifference v = area_difference(mass, mass, identity);
  const ShapeDifference r = conformal_difference(w, w, identity);
  const SfoEnergySpec spec = make_shape_from_difference_spec(mass, w, identity, v, r, 0.5);

  const AlternateResult result = alternate(spec, shape.mesh, shape.embedding, SolverConfig{});
  Embedding centered = shape.embedding;
  centered.rowwise() -= shape.embedding.colwise().mean();
  const double tolerance = 1e-3 * testmesh::bbox_diagonal(centered);
  CHECK(oracle::hausdorff(result.embedding, centered) < tolerance);
  CHECK(result.final_energy <= 1e-10 * (1.0 + result.initial_energy));
}

TEST_CASE("alternation reduces the self Laplacian round trip") {
  std::mt19937_64 rng(131);
  const auto shape = testmesh::icosphere(1);
  const DiscreteMetric target = metric_from_embedding(shape.mesh, shape.embedding);
  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, target);
  const Embedding start = testmesh::perturb(shape.embedding, 0.01, rng);

  const AlternateResult result = alternate(spec, shape.mesh, start, SolverConfig{});
  CHECK(result.final_energy <= 0.1 * result.initial_energy);
}

TEST_CASE("alternation trace interleaves the two phases") {
  std::mt19937_64 rng(137);
  const auto shape = testmesh::octahedron();
  const DiscreteMetric target = metric_from_embedding(shape.mesh, shape.embedding);
  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, target);
  const Embedding start = testmesh::perturb(shape.embedding, 0.02, rng);

  SolverConfig config;
  config.outer_iterations = 4;
  config.energy_tolerance = 0.0;  // run all outer iterations
  const AlternateResult result = alternate(spec, shape.mesh, start, config);
  CHECK(result.outer_iterations_run == 4);

  std::size_t idx = 0;
  const auto& records = result.trace.records;
  REQUIRE(records.size() ==
          static_cast<std::size_t>(4 * (config.mfo_iterations + config.mds_iterations)));
  for (int outer = 1; outer <= 4; ++outer) {
    for (int k = 1; k <= config.mfo_iterations; ++k, ++idx) {
      CHECK(records[idx].outer_iter == outer);
      CHECK(records[idx].phase == SolverPhase::MfO);
      CHECK(records[idx].inner_iter == k);
      CHECK(std::isfinite(records[idx].energy));
      CHECK(std::isnan(records[idx].stress));
    }
    for (int k = 1; k <= config.mds_iterations; ++k, ++idx) {
      CHECK(records[idx].outer_iter == outer);
      CHECK(records[idx].phase == SolverPhase::MDS);
      CHECK(records[idx].inner_iter == k);
      CHECK(std::isnan(records[idx].energy));
      CHECK(std::isfinite(records[idx].stress));
    }
  }

  // Within-phase monotonicity of the recorded curves.
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].phase != records[i - 1].phase) continue;
    if (records[i].phase == SolverPhase::MfO)
      CHECK(records[i].energy <= records[i - 1].energy);
    else
      CHECK(records[i].stress <= records[i - 1].stress + 1e-12 * (1.0 + records[i - 1].stress));
  }
}

TEST_CASE("early exit on a converged problem") {
  const auto shape = testmesh::octahedron();
  const DiscreteMetric target = metric_from_embedding(shape.mesh, shape.embedding);
  const SfoEnergySpec spec = self_laplacian_spec(shape.mesh, target);
  SolverConfig config;
  config.outer_iterations = 50;
  const AlternateResult result = alternate(spec, shape.mesh, shape.embedding, config);
  CHECK(result.outer_iterations_run < 50);  // identity problem stalls at zero immediately
}
