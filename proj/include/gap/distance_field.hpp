#pragma once

#include "gap/camera.hpp"
#include "gap/kdtree.hpp"
#include "gap/types.hpp"

#include <vector>

namespace gap {

struct DepthMap {
  static constexpr double kMiss = -1.0;

  int width = 0;
  int height = 0;
  std::vector<double> depth;  // ray distance from camera; kMiss where hit == 0
  std::vector<uint8_t> hit;

  DepthMap() = default;
  DepthMap(int w, int h)
      : width(w), height(h), depth(static_cast<size_t>(w) * h, kMiss),
        hit(static_cast<size_t>(w) * h, 0) {}

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

// Deterministic unsigned distance field over a point set: the (smoothed)
// nearest-neighbor distance, with central-difference gradients. Immutable and
// safe for concurrent queries after construction.
class DistanceField {
 public:
  static constexpr double kFdStep = 1e-3;         // finite-difference step (unit-cube scale)
  static constexpr double kSurfaceEpsFloor = 2e-3;  // minimum sphere-trace hit threshold
  static constexpr double kFarBound = 10.0;       // sphere-trace miss bound

  DistanceField(std::vector<Vec3> points, int smoothing_k = 1,
                std::vector<Vec3> point_normals = {});

  // Sphere-trace hit threshold: max(kSurfaceEpsFloor, 0.6 x mean 3-NN spacing).
  // A point-sampled UDF never drops below roughly half the sampling spacing
  // between points, so the threshold has to scale with density.
  double surface_eps() const { return surface_eps_; }

  // Distance to the nearest input point (smoothing_k = 1) or mean of the k
  // nearest distances (smoothing_k > 1). Total, non-negative.
  double udf(const Vec3& q) const;

  // Central-difference gradient of udf; not normalized.
  Vec3 gradient(const Vec3& q) const;

  // Unit surface normal. At input points this returns the precomputed
  // per-point normal (the UDF gradient is singular on the zero set); elsewhere
  // the normalized finite-difference gradient. Throws PipelineError when the
  // gradient norm is below 1e-9 away from the surface.
  Vec3 normal(const Vec3& q) const;

  const KdTree& index() const { return tree_; }
  int smoothing_k() const { return smoothing_k_; }
  bool has_point_normals() const { return !point_normals_.empty(); }
  const std::vector<Vec3>& point_normals() const { return point_normals_; }

 private:
  KdTree tree_;
  int smoothing_k_ = 1;
  std::vector<Vec3> point_normals_;  // aligned with the original point order
  double surface_eps_ = kSurfaceEpsFloor;
};

// Per-pixel sphere tracing of the implicit surface: step size equals the
// current UDF value; hit when udf < field.surface_eps(), miss beyond kFarBound.
DepthMap sphere_trace_depth(const DistanceField& field, const Camera& cam);

}  // namespace gap
