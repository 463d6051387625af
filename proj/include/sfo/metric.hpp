#pragma once

#include <Eigen/Core>
#include <vector>

#include <sfo/mesh.hpp>

namespace sfo {

// n x 3 vertex coordinate matrix; rows are points in R^3.
using Embedding = Eigen::MatrixXd;

// Default relative margin for the strong triangle inequality: a face is
// accepted only if each of its three slacks exceeds rel_margin times the
// semi-perimeter. Being relative keeps validation invariant under global
// rescaling of the metric.
inline constexpr double kDefaultRelMargin = 1e-7;

// Discrete Riemannian metric: one positive length per canonical edge.
struct DiscreteMetric {
  Eigen::VectorXd lengths;
};

struct MetricViolation {
  int face = -1;
  double margin = 0.0;  // min of the three triangle-inequality slacks
};

struct MetricValidity {
  bool valid = true;
  std::vector<MetricViolation> violations;
};

// Edge lengths induced by an embedding. Throws ZeroLengthEdge if two
// edge-adjacent vertices coincide exactly.
DiscreteMetric metric_from_embedding(const Mesh& mesh, const Embedding& x);

// Checks the strong triangle inequality on every face. Reports, never throws.
MetricValidity validate_metric(const Mesh& mesh, const DiscreteMetric& metric,
                               double rel_margin = kDefaultRelMargin);

// Heron area, evaluated in the numerically stable ordering (sorted sides,
// product form). Throws InvalidTriangle if the sides violate the strict
// triangle inequality.
double triangle_area(double a, double b, double c);

// Per-face Heron areas in face-list order.
Eigen::VectorXd face_areas(const Mesh& mesh, const DiscreteMetric& metric);

}  // namespace sfo
