#pragma once

#include "gap/point_cloud.hpp"
#include "gap/types.hpp"

#include <vector>

namespace gap {

struct NormalEstimate {
  std::vector<Vec3> normals;       // unit length, globally oriented
  std::vector<uint8_t> degenerate; // 1 where the PCA neighborhood was collinear
};

// k-NN PCA normals with minimum-spanning-tree orientation propagation, seeded
// at the point of maximal z (oriented toward +z). Degenerate neighborhoods
// fall back to the direction from the cloud centroid to the point.
// Requires cloud.size() >= k_neighbors and k_neighbors >= 4.
NormalEstimate estimate_normals(const PointCloud& cloud, int k_neighbors = 16);

}  // namespace gap
