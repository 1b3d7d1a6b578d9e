#pragma once

#include <random>

#include "tresca/mesh.hpp"

namespace tresca::testing {

/// Structured mesh of [x0, x0+len]^2 with n x n cells, each split along the
/// main diagonal. Boundary edges run counterclockwise from (x0, x0).
inline Mesh square_mesh(int n, double len = 1.0, double x0 = 0.0) {
  const int nv = (n + 1) * (n + 1);
  Eigen::Matrix2Xd v(2, nv);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.col(id(i, j)) << x0 + len * i / n, x0 + len * j / n;
  Eigen::Matrix3Xi t(3, 2 * n * n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      t.col(k++) << id(i, j), id(i + 1, j), id(i + 1, j + 1);
      t.col(k++) << id(i, j), id(i + 1, j + 1), id(i, j + 1);
    }
  std::vector<int> loop;
  for (int i = 0; i < n; ++i) loop.push_back(id(i, 0));
  for (int j = 0; j < n; ++j) loop.push_back(id(n, j));
  for (int i = n; i > 0; --i) loop.push_back(id(i, n));
  for (int j = n; j > 0; --j) loop.push_back(id(0, j));
  Eigen::Matrix2Xi e(2, loop.size());
  for (std::size_t b = 0; b < loop.size(); ++b)
    e.col(b) << loop[b], loop[(b + 1) % loop.size()];
  return Mesh(v, t, e);
}

/// Coarse ellipse mesh with randomly jittered interior vertices.
inline Mesh jittered_ellipse(std::mt19937& rng, int n_theta, int n_rings) {
  std::uniform_real_distribution<double> axis(0.8, 1.4), jitter(-0.15, 0.15);
  const double a = axis(rng), b = axis(rng);
  const Mesh base = generate_ellipse_mesh(a, b, n_theta, n_rings);
  Eigen::Matrix2Xd v = base.vertices();
  const double h = std::min(a, b) / n_rings;
  for (Eigen::Index i = 0; i < v.cols(); ++i)
    if (!base.on_boundary(i)) v.col(i) += h * Point(jitter(rng), jitter(rng));
  return Mesh(v, base.triangles(), base.boundary_edges());
}

}  // namespace tresca::testing
