#pragma once

#include "gap/point_cloud.hpp"
#include "gap/types.hpp"

#include <vector>

namespace gap {

// One oriented 2D Gaussian disk: the rotation's local z axis is the disk
// normal, the two scales are the in-plane standard deviations (world units).
struct GaussianDisk {
  Vec3 center = Vec3::Zero();
  Quat rotation = Quat::Identity();
  Vec2 scale = Vec2::Ones();
  double opacity = 0.9;
  Vec3 color = Vec3::Constant(0.5);
};

// Attribute arrays for M disks plus per-disk view bookkeeping.
struct GaussianSet {
  std::vector<Vec3> centers;
  std::vector<Quat> rotations;
  std::vector<Vec2> scales;
  std::vector<double> opacities;
  std::vector<Vec3> colors;
  std::vector<double> best_view_cos;  // best observation cosine so far; -1 when unseen
  std::vector<uint8_t> seen;

  size_t size() const { return centers.size(); }

  GaussianDisk disk(size_t i) const {
    return {centers[i], rotations[i], scales[i], opacities[i], colors[i]};
  }

  void push_back(const GaussianDisk& g) {
    centers.push_back(g.center);
    rotations.push_back(g.rotation);
    scales.push_back(g.scale);
    opacities.push_back(g.opacity);
    colors.push_back(g.color);
    best_view_cos.push_back(-1.0);
    seen.push_back(0);
  }

  bool consistent() const {
    const size_t m = centers.size();
    return rotations.size() == m && scales.size() == m && opacities.size() == m &&
           colors.size() == m && best_view_cos.size() == m && seen.size() == m;
  }
};

// Rotation matrix of a (normalized) quaternion; columns are the disk's first
// tangent axis, second tangent axis, and normal.
Mat3 rotation_axes(const Quat& q);

// Deterministic disk frame for a given normal: the first tangent axis is the
// projection of global x onto the disk plane (global y when too parallel).
Quat rotation_from_normal(const Vec3& n);

// One disk per point: center = point, orientation from the normal, both scales
// equal to the mean distance to the 3 nearest neighbors, opacity 0.9, mid-gray.
GaussianSet init_gaussians(const PointCloud& cloud, const std::vector<Vec3>& normals);

// R diag(s1^2, s2^2, 0) R^T.
Mat3 covariance_of(const GaussianDisk& g);

// exp(-1/2 (u1^2/s1^2 + u2^2/s2^2)) at local in-plane coordinates u.
double evaluate_density(const GaussianDisk& g, const Vec2& u);

Vec3 disk_normal(const GaussianDisk& g);

// Mean distance to the 3 nearest neighbors, averaged over the cloud. The
// optimizer's scale cap and the inpainting radius are tied to this spacing.
double mean_knn_spacing(const std::vector<Vec3>& points, int k = 3);

}  // namespace gap
