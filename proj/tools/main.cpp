// Command-line synthesis and diagnostics for shape-from-operator problems.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <sfo/energy.hpp>
#include <sfo/io.hpp>
#include <sfo/operators.hpp>
#include <sfo/solvers.hpp>

namespace {

// Flag combinations that can only be validated after files are loaded.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  sfo::SolverConfig config;
  double initial_step = 0.0;  // 0 keeps the metric-relative default
  double perturb = 0.0;
  std::uint64_t seed = 0;
  std::string trace_path;
  std::string vertex_energy_path;
};

void add_solver_flags(CLI::App* cmd, SolveOptions& opt) {
  cmd->add_option("--outer", opt.config.outer_iterations, "Outer alternation iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--mfo-steps", opt.config.mfo_iterations, "Descent steps per outer iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--mds-steps", opt.config.mds_iterations, "Majorization steps per outer iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--step", opt.initial_step,
                  "Initial descent step (default: 1e-2 x mean edge length)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-halvings", opt.config.max_halvings, "Step halvings before skipping")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--rel-margin", opt.config.rel_margin,
                  "Relative triangle-inequality margin for accepted metrics")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--energy-tol", opt.config.energy_tolerance,
                  "Relative early-exit tolerance per outer iteration (0 disables)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--perturb", opt.perturb,
                  "Gaussian noise on the starting coordinates, as a fraction of the bounding-box diagonal")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", opt.seed, "Random seed for --perturb")->capture_default_str();
  cmd->add_option("--trace", opt.trace_path, "Write the solver trace CSV here");
  cmd->add_option("--vertex-energy", opt.vertex_energy_path,
                  "Write the per-vertex energy CSV here (square residuals only)");
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_config(const SolveOptions& opt, double lambda) {
  std::cout << "solver config: outer_iterations=" << opt.config.outer_iterations
            << " mfo_iterations=" << opt.config.mfo_iterations
            << " mds_iterations=" << opt.config.mds_iterations << " initial_step="
            << (opt.initial_step > 0.0 ? fmt17(opt.initial_step) : std::string("auto"))
            << " max_halvings=" << opt.config.max_halvings
            << " rel_margin=" << fmt17(opt.config.rel_margin)
            << " energy_tolerance=" << fmt17(opt.config.energy_tolerance)
            << " lambda=" << fmt17(lambda) << " perturb=" << fmt17(opt.perturb)
            << " seed=" << opt.seed << "\n";
}

sfo::Embedding perturbed_start(const sfo::Embedding& x, const SolveOptions& opt) {
  if (opt.perturb == 0.0) return x;
  const double diagonal = (x.colwise().maxCoeff() - x.colwise().minCoeff()).norm();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, opt.perturb * diagonal);
  sfo::Embedding out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) += gauss(rng);
  return out;
}

sfo::SolverConfig final_config(const SolveOptions& opt) {
  sfo::SolverConfig config = opt.config;
  if (opt.initial_step > 0.0) config.initial_step = opt.initial_step;
  return config;
}

// Functional map from one of the three flag forms. Maps functions on a shape
// with `source_n` vertices to functions on one with `target_rows` vertices;
// a point map sends each of the `target_rows` vertices to a source vertex.
sfo::FunctionalMap load_map(const std::string& map_path, const std::string& point_map_path,
                            bool identity, int target_rows, int source_n, const char* what) {
  const int given = (!map_path.empty()) + (!point_map_path.empty()) + identity;
  if (given > 1) throw UsageError(std::string("choose at most one map option for ") + what);
  if (!map_path.empty()) return sfo::read_dense_matrix(map_path);
  if (!point_map_path.empty()) {
    const std::vector<int> t = sfo::read_point_map(point_map_path);
    if (static_cast<int>(t.size()) != target_rows)
      throw sfo::DimensionMismatch(std::string(what) + ": point map has " +
                                   std::to_string(t.size()) + " entries, expected " +
                                   std::to_string(target_rows));
    return sfo::functional_map_from_point_map(t, source_n);
  }
  if (target_rows != source_n)
    throw sfo::DimensionMismatch(std::string(what) +
                                 ": identity map needs equal vertex counts, got " +
                                 std::to_string(target_rows) + " and " + std::to_string(source_n));
  return Eigen::MatrixXd::Identity(target_rows, source_n);
}

void run_alternation_and_write(const sfo::SfoEnergySpec& spec, const sfo::Mesh& mesh,
                               const sfo::Embedding& start, const SolveOptions& opt,
                               const std::string& out_path) {
  const sfo::AlternateResult result = sfo::alternate(spec, mesh, start, final_config(opt));
  sfo::write_off(out_path, mesh, result.embedding);
  std::cout << "initial_energy=" << fmt17(result.initial_energy) << "\n"
            << "final_energy=" << fmt17(result.final_energy) << "\n"
            << "outer_iterations_run=" << result.outer_iterations_run << "\n"
            << "wrote " << out_path << "\n";
  if (!opt.trace_path.empty()) {
    sfo::write_trace_csv(opt.trace_path, result.trace);
    std::cout << "wrote " << opt.trace_path << "\n";
  }
  if (!opt.vertex_energy_path.empty()) {
    try {
      const Eigen::VectorXd eps =
          sfo::per_vertex_energy(spec, mesh, sfo::metric_from_embedding(mesh, result.embedding));
      sfo::write_vertex_csv(opt.vertex_energy_path, eps);
      std::cout << "wrote " << opt.vertex_energy_path << "\n";
    } catch (const sfo::ShapeMismatch&) {
      std::cout << "vertex energies skipped: residuals are not square\n";
    }
  }
}

struct LaplacianArgs {
  std::string source, target_stiffness, out, map, point_map;
  bool identity_map = false;
  SolveOptions solve;
};

void run_shape_from_laplacian(const LaplacianArgs& args) {
  print_config(args.solve, 0.0);
  const auto [mesh, embedding] = sfo::read_off(args.source);
  const Eigen::MatrixXd target = sfo::read_dense_matrix(args.target_stiffness);
  const sfo::FunctionalMap f =
      load_map(args.map, args.point_map, args.identity_map, mesh.vertex_count,
               static_cast<int>(target.cols()), "--map");
  const sfo::SfoEnergySpec spec = sfo::make_shape_from_laplacian_spec(f, target);
  run_alternation_and_write(spec, mesh, perturbed_start(embedding, args.solve), args.solve, args.out);
}

struct AnalogyArgs {
  std::string a, b, c, out;
  std::string map_ab, point_map_ab;
  bool identity_map_ab = false;
  std::string map_cx, point_map_cx;
  bool identity_map_cx = false;
  double lambda = 0.5;
  SolveOptions solve;
};

sfo::SfoEnergySpec analogy_spec(const sfo::Mesh& mesh_a, const sfo::Embedding& emb_a,
                                const sfo::Mesh& mesh_b, const sfo::Embedding& emb_b,
                                const sfo::Mesh& mesh_c, const sfo::Embedding& emb_c,
                                const AnalogyArgs& args) {
  const sfo::DiscreteMetric la = sfo::metric_from_embedding(mesh_a, emb_a);
  const sfo::DiscreteMetric lb = sfo::metric_from_embedding(mesh_b, emb_b);
  const sfo::DiscreteMetric lc = sfo::metric_from_embedding(mesh_c, emb_c);

  const sfo::FunctionalMap f = load_map(args.map_ab, args.point_map_ab, args.identity_map_ab,
                                        mesh_b.vertex_count, mesh_a.vertex_count, "--map-ab");
  const sfo::FunctionalMap g = load_map(args.map_cx, args.point_map_cx, args.identity_map_cx,
                                        mesh_c.vertex_count, mesh_a.vertex_count, "--map-cx");

  const sfo::MassMatrix mass_a = sfo::mass_matrix(mesh_a, la);
  const sfo::MassMatrix mass_b = sfo::mass_matrix(mesh_b, lb);
  const sfo::StiffnessMatrix stiff_a = sfo::stiffness_matrix(mesh_a, la);
  const sfo::StiffnessMatrix stiff_b = sfo::stiffness_matrix(mesh_b, lb);
  const sfo::ShapeDifference v_ab = sfo::area_difference(mass_a, mass_b, f);
  const sfo::ShapeDifference r_ab = sfo::conformal_difference(stiff_a, stiff_b, f);

  const sfo::MassMatrix mass_c = sfo::mass_matrix(mesh_c, lc);
  const sfo::StiffnessMatrix stiff_c = sfo::stiffness_matrix(mesh_c, lc);
  return sfo::make_shape_from_difference_spec(mass_c, stiff_c, g, v_ab, r_ab, args.lambda);
}

void run_analogy(const AnalogyArgs& args) {
  print_config(args.solve, args.lambda);
  const auto [mesh_a, emb_a] = sfo::read_off(args.a);
  const auto [mesh_b, emb_b] = sfo::read_off(args.b);
  const auto [mesh_c, emb_c] = sfo::read_off(args.c);
  const sfo::SfoEnergySpec spec = analogy_spec(mesh_a, emb_a, mesh_b, emb_b, mesh_c, emb_c, args);
  run_alternation_and_write(spec, mesh_c, perturbed_start(emb_c, args.solve), args.solve, args.out);
}

struct ExaggerateArgs {
  std::string a, b, out_prefix;
  std::string map_ab, point_map_ab;
  bool identity_map_ab = false;
  int rounds = 1;
  double lambda = 0.5;
  SolveOptions solve;
};

void run_exaggerate(const ExaggerateArgs& args) {
  print_config(args.solve, args.lambda);
  const auto [mesh_a, emb_a] = sfo::read_off(args.a);
  const auto [mesh_b, emb_b] = sfo::read_off(args.b);

  AnalogyArgs round_args;
  round_args.map_ab = args.map_ab;
  round_args.point_map_ab = args.point_map_ab;
  round_args.identity_map_ab = args.identity_map_ab;
  // C coincides with B, so the map from A to the synthesis mesh is the A-to-B
  // map itself.
  round_args.map_cx = args.map_ab;
  round_args.point_map_cx = args.point_map_ab;
  round_args.identity_map_cx = args.identity_map_ab;
  round_args.lambda = args.lambda;
  round_args.solve = args.solve;

  sfo::Embedding current = emb_b;
  for (int round = 1; round <= args.rounds; ++round) {
    // The difference from A to the current shape is applied to that shape
    // itself, amplifying it every round.
    const sfo::SfoEnergySpec spec =
        analogy_spec(mesh_a, emb_a, mesh_b, current, mesh_b, current, round_args);
    const sfo::AlternateResult result =
        sfo::alternate(spec, mesh_b, perturbed_start(current, args.solve), final_config(args.solve));
    current = result.embedding;
    const std::string path = args.out_prefix + "_" + std::to_string(round) + ".off";
    sfo::write_off(path, mesh_b, current);
    std::cout << "round " << round << ": initial_energy=" << fmt17(result.initial_energy)
              << " final_energy=" << fmt17(result.final_energy) << " wrote " << path << "\n";
  }
}

struct DiagnoseArgs {
  std::string mesh_path, metric_path, csv_path;
  double rel_margin = sfo::kDefaultRelMargin;
};

int run_diagnose(const DiagnoseArgs& args) {
  std::cout << "diagnose config: rel_margin=" << fmt17(args.rel_margin) << "\n";
  const auto [mesh, embedding] = sfo::read_off(args.mesh_path);
  const sfo::DiscreteMetric metric = args.metric_path.empty()
                                         ? sfo::metric_from_embedding(mesh, embedding)
                                         : sfo::read_edge_csv(args.metric_path, mesh);

  const sfo::MetricValidity validity = sfo::validate_metric(mesh, metric, args.rel_margin);
  if (!validity.valid) {
    std::cout << "metric INVALID on " << validity.violations.size() << " face(s):\n";
    for (const auto& violation : validity.violations)
      std::cout << "  face " << violation.face << " min slack " << fmt17(violation.margin) << "\n";
    return 1;
  }

  const sfo::MeshQualityReport report = sfo::mesh_quality_report(mesh, metric);
  std::cout << "vertices=" << mesh.vertex_count << " edges=" << mesh.edge_count()
            << " faces=" << mesh.face_count() << "\n"
            << "negative_weight_edges=" << report.negative_weight_edges.size() << "\n"
            << "obtuse_faces=" << report.obtuse_faces.size() << "\n"
            << "min_slack=" << fmt17(report.min_slack) << "\n"
            << "min_rel_slack=" << fmt17(report.min_rel_slack) << "\n";
  for (int e : report.negative_weight_edges)
    std::cout << "  negative edge (" << mesh.edges[e][0] << "," << mesh.edges[e][1] << ")\n";

  if (!args.csv_path.empty()) {
    std::ofstream out(args.csv_path, std::ios::binary);
    if (!out) throw sfo::IoError("cannot open " + args.csv_path + " for writing");
    out << "kind,a,b,value\n";
    for (int e : report.negative_weight_edges)
      out << "negative_edge," << mesh.edges[e][0] << ',' << mesh.edges[e][1] << ",\n";
    for (int f : report.obtuse_faces) out << "obtuse_face," << f << ",,\n";
    out << "min_slack,,," << fmt17(report.min_slack) << "\n";
    out << "min_rel_slack,,," << fmt17(report.min_rel_slack) << "\n";
    std::cout << "wrote " << args.csv_path << "\n";
  }
  return 0;
}

struct OperatorsArgs {
  std::string mesh_path, metric_path, emit, out, out_values;
  int k = 0;
  double rel_tol = sfo::kDefaultPinvRelTol;
};

void run_operators(const OperatorsArgs& args) {
  std::cout << "operators config: emit=" << args.emit << " pinv_rel_tol=" << fmt17(args.rel_tol)
            << "\n";
  const auto [mesh, embedding] = sfo::read_off(args.mesh_path);
  const sfo::DiscreteMetric metric = args.metric_path.empty()
                                         ? sfo::metric_from_embedding(mesh, embedding)
                                         : sfo::read_edge_csv(args.metric_path, mesh);
  if (args.emit == "mass") {
    const sfo::MassMatrix mass = sfo::mass_matrix(mesh, metric);
    sfo::write_dense_matrix(args.out, mass.diag);
  } else if (args.emit == "stiffness") {
    sfo::write_dense_matrix(args.out, sfo::stiffness_matrix(mesh, metric).dense());
  } else if (args.emit == "eigs") {
    if (args.k < 1) throw UsageError("--emit eigs needs --k");
    if (args.k > mesh.vertex_count)
      throw UsageError("--k " + std::to_string(args.k) + " exceeds the vertex count " +
                       std::to_string(mesh.vertex_count));
    const sfo::LbEigenBasis basis = sfo::lb_eigenbasis(mesh, metric, args.k);
    sfo::write_dense_matrix(args.out, basis.vectors);
    const std::string values_path = args.out_values.empty() ? args.out + ".vals" : args.out_values;
    sfo::write_dense_matrix(values_path, basis.values);
    std::cout << "wrote " << values_path << "\n";
  }
  std::cout << "wrote " << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh synthesis from intrinsic operators: reconstructs embeddings whose "
               "Laplacians or shape-difference operators match prescribed targets"};
  app.require_subcommand(1);

  LaplacianArgs lap;
  CLI::App* cmd_lap = app.add_subcommand(
      "shape-from-laplacian", "Deform a source mesh until its stiffness matrix matches a target");
  cmd_lap->add_option("--source", lap.source, "Source mesh (OFF)")->required();
  cmd_lap->add_option("--target-stiffness", lap.target_stiffness, "Target stiffness matrix file")
      ->required();
  cmd_lap->add_option("--out", lap.out, "Output mesh (OFF)")->required();
  cmd_lap->add_option("--map", lap.map, "Functional map file (n x l)");
  cmd_lap->add_option("--point-map", lap.point_map, "Point map file (one \"row target\" per line)");
  cmd_lap->add_flag("--identity-map", lap.identity_map, "Use the identity functional map");
  add_solver_flags(cmd_lap, lap.solve);
  cmd_lap->callback([&] { run_shape_from_laplacian(lap); });

  AnalogyArgs ana;
  CLI::App* cmd_ana = app.add_subcommand(
      "analogy", "Synthesize X so that the difference from C to X matches the one from A to B");
  cmd_ana->add_option("--A", ana.a, "Shape A (OFF)")->required();
  cmd_ana->add_option("--B", ana.b, "Shape B (OFF)")->required();
  cmd_ana->add_option("--C", ana.c, "Shape C (OFF); its mesh carries the synthesis")->required();
  cmd_ana->add_option("--out", ana.out, "Output mesh (OFF)")->required();
  cmd_ana->add_option("--map-ab", ana.map_ab, "Functional map from A-functions to B-functions");
  cmd_ana->add_option("--point-map-ab", ana.point_map_ab, "Point map from B vertices to A vertices");
  cmd_ana->add_flag("--identity-map-ab", ana.identity_map_ab, "Identity map between A and B");
  cmd_ana->add_option("--map-cx", ana.map_cx, "Functional map from A-functions to C-functions");
  cmd_ana->add_option("--point-map-cx", ana.point_map_cx, "Point map from C vertices to A vertices");
  cmd_ana->add_flag("--identity-map", ana.identity_map_cx, "Identity map between A and C");
  cmd_ana->add_option("--lambda", ana.lambda, "Weight of the area term")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_solver_flags(cmd_ana, ana.solve);
  cmd_ana->callback([&] { run_analogy(ana); });

  ExaggerateArgs exa;
  CLI::App* cmd_exa = app.add_subcommand(
      "exaggerate", "Apply the difference from A to B onto B itself, repeatedly");
  cmd_exa->add_option("--A", exa.a, "Shape A (OFF)")->required();
  cmd_exa->add_option("--B", exa.b, "Shape B (OFF)")->required();
  cmd_exa->add_option("--out-prefix", exa.out_prefix, "Outputs <prefix>_<round>.off")->required();
  cmd_exa->add_option("--map-ab", exa.map_ab, "Functional map from A-functions to B-functions");
  cmd_exa->add_option("--point-map-ab", exa.point_map_ab, "Point map from B vertices to A vertices");
  cmd_exa->add_flag("--identity-map", exa.identity_map_ab, "Identity map between A and B");
  cmd_exa->add_option("--rounds", exa.rounds, "Number of exaggeration rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_exa->add_option("--lambda", exa.lambda, "Weight of the area term")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_solver_flags(cmd_exa, exa.solve);
  cmd_exa->callback([&] { run_exaggerate(exa); });

  DiagnoseArgs dia;
  int diagnose_status = 0;
  CLI::App* cmd_dia = app.add_subcommand(
      "diagnose", "Report negative weights, obtuse faces, and triangle-inequality slack");
  cmd_dia->add_option("--mesh", dia.mesh_path, "Mesh (OFF)")->required();
  cmd_dia->add_option("--metric", dia.metric_path, "Edge-length CSV (default: induced lengths)");
  cmd_dia->add_option("--csv", dia.csv_path, "Write the report as CSV here");
  cmd_dia->add_option("--rel-margin", dia.rel_margin, "Relative triangle-inequality margin")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd_dia->callback([&] { diagnose_status = run_diagnose(dia); });

  OperatorsArgs ops;
  CLI::App* cmd_ops = app.add_subcommand("operators", "Emit mass, stiffness, or eigenbasis files");
  cmd_ops->add_option("--mesh", ops.mesh_path, "Mesh (OFF)")->required();
  cmd_ops->add_option("--metric", ops.metric_path, "Edge-length CSV (default: induced lengths)");
  cmd_ops->add_option("--emit", ops.emit, "One of: mass, stiffness, eigs")
      ->required()
      ->check(CLI::IsMember({"mass", "stiffness", "eigs"}));
  cmd_ops->add_option("--out", ops.out, "Output file")->required();
  cmd_ops->add_option("--out-values", ops.out_values, "Eigenvalue output (default: <out>.vals)");
  cmd_ops->add_option("--k", ops.k, "Number of eigenpairs for --emit eigs");
  cmd_ops->add_option("--rel-tol", ops.rel_tol, "Pseudoinverse eigenvalue cutoff")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd_ops->callback([&] { run_operators(ops); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const sfo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return diagnose_status;
}
