#pragma once

// Closed-mesh generators and randomization helpers shared by the unit and
// acceptance suites.

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <sfo/metric.hpp>
#include <sfo/mesh.hpp>

namespace testmesh {

struct Shape {
  sfo::Mesh mesh;
  sfo::Embedding embedding;
};

inline Shape tetrahedron(double edge = 1.0) {
  Eigen::MatrixXd x(4, 3);
  x << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  x *= edge / (2.0 * std::sqrt(2.0));
  return {sfo::build_mesh(4, {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {2, 3, 0}}), x};
}

inline Shape octahedron(double radius = 1.0) {
  Eigen::MatrixXd x(6, 3);
  x << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  x *= radius;
  return {sfo::build_mesh(6, {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                              {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}}),
          x};
}

// Icosphere: icosahedron with `subdivisions` rounds of 1-to-4 splitting,
// vertices projected onto the sphere. n = 12, 42, 162, 642, ...
inline Shape icosphere(int subdivisions = 0, double radius = 1.0) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : verts) v.normalize();

  for (int round = 0; round < subdivisions; ++round) {
    std::map<std::pair<int, int>, int> midpoint;
    const auto split = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int m = static_cast<int>(verts.size());
      verts.push_back(((verts[static_cast<std::size_t>(a)] + verts[static_cast<std::size_t>(b)]) / 2.0).normalized());
      midpoint.emplace(key, m);
      return m;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& [a, b, c] : faces) {
      const int ab = split(a, b), bc = split(b, c), ca = split(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t v = 0; v < verts.size(); ++v) x.row(static_cast<Eigen::Index>(v)) = radius * verts[v];
  return {sfo::build_mesh(static_cast<int>(verts.size()), std::move(faces)), x};
}

// p x q quad grid on a torus, each quad split into two triangles. n = p*q.
inline Shape torus(int p, int q, double major = 2.0, double minor = 0.8) {
  const auto vid = [q](int i, int j) { return i * q + j; };
  Eigen::MatrixXd x(p * q, 3);
  for (int i = 0; i < p; ++i) {
    const double theta = 2.0 * M_PI * i / p;
    for (int j = 0; j < q; ++j) {
      const double phi = 2.0 * M_PI * j / q;
      const double rad = major + minor * std::cos(phi);
      x.row(vid(i, j)) << rad * std::cos(theta), rad * std::sin(theta), minor * std::sin(phi);
    }
  }
  std::vector<std::array<int, 3>> faces;
  faces.reserve(static_cast<std::size_t>(2 * p * q));
  for (int i = 0; i < p; ++i) {
    const int i1 = (i + 1) % p;
    for (int j = 0; j < q; ++j) {
      const int j1 = (j + 1) % q;
      faces.push_back({vid(i, j), vid(i1, j), vid(i, j1)});
      faces.push_back({vid(i1, j), vid(i1, j1), vid(i, j1)});
    }
  }
  return {sfo::build_mesh(p * q, std::move(faces)), x};
}

// Two apexes over a k-gon ring; n = k + 2. Deliberately produces obtuse
// triangles for large k.
inline Shape bipyramid(int k, double height = 0.9) {
  Eigen::MatrixXd x(k + 2, 3);
  for (int i = 0; i < k; ++i) {
    const double a = 2.0 * M_PI * i / k;
    x.row(i) << std::cos(a), std::sin(a), 0.0;
  }
  x.row(k) << 0, 0, height;
  x.row(k + 1) << 0, 0, -height;
  std::vector<std::array<int, 3>> faces;
  for (int i = 0; i < k; ++i) {
    const int next = (i + 1) % k;
    faces.push_back({k, i, next});
    faces.push_back({k + 1, next, i});
  }
  return {sfo::build_mesh(k + 2, std::move(faces)), x};
}

inline double bbox_diagonal(const sfo::Embedding& x) {
  return (x.colwise().maxCoeff() - x.colwise().minCoeff()).norm();
}

inline sfo::Embedding perturb(const sfo::Embedding& x, double sigma_fraction, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, sigma_fraction * bbox_diagonal(x));
  sfo::Embedding out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) += gauss(rng);
  return out;
}

// Multiplicative log-normal noise on the edge lengths, shrinking the noise
// until the strong triangle inequality holds with a healthy slack. The
// 1e-3 relative margin keeps faces far enough from degenerate that central
// finite differences at h = 1e-6 l stay trustworthy.
inline sfo::DiscreteMetric random_valid_metric(const sfo::Mesh& mesh, const sfo::DiscreteMetric& base,
                                               double rel_noise, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 60; ++attempt) {
    sfo::DiscreteMetric candidate;
    candidate.lengths = base.lengths;
    for (Eigen::Index e = 0; e < candidate.lengths.size(); ++e)
      candidate.lengths[e] *= std::exp(rel_noise * gauss(rng));
    if (sfo::validate_metric(mesh, candidate, 1e-3).valid) return candidate;
    rel_noise *= 0.7;
  }
  return base;
}

inline sfo::Embedding random_embedding(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  sfo::Embedding x(n, 3);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < 3; ++c) x(r, c) = gauss(rng);
  return x;
}

}  // namespace testmesh
