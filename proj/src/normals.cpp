#include "gap/normals.hpp"

#include "gap/errors.hpp"
#include "gap/kdtree.hpp"
#include "gap/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace gap {

NormalEstimate estimate_normals(const PointCloud& cloud, int k_neighbors) {
  const int n = static_cast<int>(cloud.size());
  if (k_neighbors < 4) throw PipelineError("estimate_normals: k_neighbors must be >= 4");
  if (n < k_neighbors) throw PipelineError("estimate_normals: cloud smaller than k_neighbors");

  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud.points) centroid += p;
  centroid /= n;

  const KdTree tree(cloud.points);

  NormalEstimate est;
  est.normals.assign(n, Vec3::UnitZ());
  est.degenerate.assign(n, 0);
  std::vector<std::vector<int>> neighbors(n);

  parallel_for(0, n, [&](int i) {
    std::vector<int> idx;
    std::vector<double> dist;
    tree.knn(cloud.points[i], k_neighbors + 1, idx, dist);
    // drop self (distance 0, first entry)
    std::vector<int>& nb = neighbors[i];
    nb.reserve(k_neighbors);
    for (size_t j = 0; j < idx.size() && static_cast<int>(nb.size()) < k_neighbors; ++j)
      if (idx[j] != i) nb.push_back(idx[j]);

    Vec3 mean = cloud.points[i];
    for (int j : nb) mean += cloud.points[j];
    mean /= static_cast<double>(nb.size() + 1);

    Mat3 cov = Mat3::Zero();
    {
      const Vec3 d = cloud.points[i] - mean;
      cov += d * d.transpose();
    }
    for (int j : nb) {
      const Vec3 d = cloud.points[j] - mean;
      cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 evals = eig.eigenvalues();  // ascending
    if (evals[2] <= 0 || evals[1] <= 1e-12 * evals[2]) {
      // collinear (or fully degenerate) neighborhood
      est.degenerate[i] = 1;
      Vec3 fallback = cloud.points[i] - centroid;
      if (fallback.squaredNorm() < 1e-24) fallback = Vec3::UnitZ();
      est.normals[i] = fallback.normalized();
    } else {
      est.normals[i] = eig.eigenvectors().col(0).normalized();
    }
  });

  // Orientation propagation over the symmetrized k-NN graph, Prim-style MST
  // with edge weight 1 - |n_i . n_j| (Hoppe et al. style).
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j : neighbors[i]) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }

  std::vector<uint8_t> done(n, 0);
  using Edge = std::pair<double, std::pair<int, int>>;  // (weight, (from, to))
  std::priority_queue<Edge, std::vector<Edge>, std::greater<Edge>> frontier;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cloud.points[a].z() != cloud.points[b].z()) return cloud.points[a].z() > cloud.points[b].z();
    return a < b;
  });

  size_t seed_cursor = 0;
  int remaining = n;
  while (remaining > 0) {
    // next component seed: unvisited point of maximal z, oriented toward +z
    while (seed_cursor < order.size() && done[order[seed_cursor]]) ++seed_cursor;
    const int seed = order[seed_cursor];
    if (est.normals[seed].z() < 0) est.normals[seed] = -est.normals[seed];
    done[seed] = 1;
    --remaining;
    for (int j : adj[seed])
      if (!done[j]) frontier.push({1.0 - std::abs(est.normals[seed].dot(est.normals[j])), {seed, j}});

    while (!frontier.empty()) {
      const auto [w, edge] = frontier.top();
      frontier.pop();
      const auto [from, to] = edge;
      if (done[to]) continue;
      if (est.normals[from].dot(est.normals[to]) < 0) est.normals[to] = -est.normals[to];
      done[to] = 1;
      --remaining;
      for (int j : adj[to])
        if (!done[j]) frontier.push({1.0 - std::abs(est.normals[to].dot(est.normals[j])), {to, j}});
    }
  }

  return est;
}

}  // namespace gap
