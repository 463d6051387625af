#include <sfo/metric.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace sfo {

DiscreteMetric metric_from_embedding(const Mesh& mesh, const Embedding& x) {
  if (x.rows() != mesh.vertex_count || x.cols() != 3)
    throw DimensionMismatch("embedding must be " + std::to_string(mesh.vertex_count) +
                            "x3, got " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()));
  DiscreteMetric metric;
  metric.lengths.resize(mesh.edge_count());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& [i, j] = mesh.edges[static_cast<std::size_t>(e)];
    const double len = (x.row(i) - x.row(j)).norm();
    if (len == 0.0)
      throw ZeroLengthEdge("vertices " + std::to_string(i) + " and " + std::to_string(j) +
                           " coincide");
    metric.lengths[e] = len;
  }
  return metric;
}

MetricValidity validate_metric(const Mesh& mesh, const DiscreteMetric& metric,
                               double rel_margin) {
  MetricValidity result;
  if (metric.lengths.size() != mesh.edge_count()) {
    result.valid = false;
    result.violations.push_back({-1, 0.0});
    return result;
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    const double a = metric.lengths[fe[0]];
    const double b = metric.lengths[fe[1]];
    const double c = metric.lengths[fe[2]];
    const double slack = std::min({a + b - c, b + c - a, c + a - b});
    const double s = (a + b + c) / 2.0;
    const bool positive = a > 0.0 && b > 0.0 && c > 0.0;
    if (!positive || !(slack > rel_margin * s)) {
      result.valid = false;
      result.violations.push_back({f, slack});
    }
  }
  return result;
}

double triangle_area(double a, double b, double c) {
  // Sorted product form: with a >= b >= c the four factors are exact to
  // within rounding even for needle triangles.
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  if (!(c > 0.0) || !(c - (a - b) > 0.0))
    throw InvalidTriangle("side lengths (" + std::to_string(a) + ", " + std::to_string(b) +
                          ", " + std::to_string(c) + ") violate the strict triangle inequality");
  const double radicand = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  if (!(radicand > 0.0))
    throw InvalidTriangle("degenerate triangle with sides (" + std::to_string(a) + ", " +
                          std::to_string(b) + ", " + std::to_string(c) + ")");
  return 0.25 * std::sqrt(radicand);
}

Eigen::VectorXd face_areas(const Mesh& mesh, const DiscreteMetric& metric) {
  if (metric.lengths.size() != mesh.edge_count())
    throw DimensionMismatch("metric has " + std::to_string(metric.lengths.size()) +
                            " lengths, mesh has " + std::to_string(mesh.edge_count()) + " edges");
  Eigen::VectorXd areas(mesh.face_count());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto& fe = mesh.face_edges[static_cast<std::size_t>(f)];
    try {
      areas[f] = triangle_area(metric.lengths[fe[0]], metric.lengths[fe[1]], metric.lengths[fe[2]]);
    } catch (const InvalidTriangle& err) {
      throw InvalidTriangle("face " + std::to_string(f) + ": " + err.what());
    }
  }
  return areas;
}

}  // namespace sfo
