#include "gap/distance_field.hpp"

#include "gap/errors.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace gap {

DistanceField::DistanceField(std::vector<Vec3> points, int smoothing_k,
                             std::vector<Vec3> point_normals)
    : tree_(std::move(points)), smoothing_k_(smoothing_k), point_normals_(std::move(point_normals)) {
  if (tree_.empty()) throw PipelineError("distance field: empty point set");
  if (smoothing_k_ < 1) throw PipelineError("distance field: smoothing_k must be >= 1");
  if (!point_normals_.empty() && point_normals_.size() != tree_.size())
    throw PipelineError("distance field: normals/points length mismatch");
  surface_eps_ = std::max(kSurfaceEpsFloor, 0.6 * mean_knn_spacing(tree_.points()));
}

double DistanceField::udf(const Vec3& q) const {
  if (smoothing_k_ == 1) {
    double sq = 0.0;
    tree_.nearest(q, &sq);
    return std::sqrt(sq);
  }
  thread_local std::vector<int> idx;
  thread_local std::vector<double> dist;
  tree_.knn(q, smoothing_k_, idx, dist);
  double sum = 0.0;
  for (double d : dist) sum += d;
  return sum / static_cast<double>(dist.size());
}

Vec3 DistanceField::gradient(const Vec3& q) const {
  const double h = kFdStep;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = q, hi = q;
    lo[a] -= h;
    hi[a] += h;
    g[a] = (udf(hi) - udf(lo)) / (2.0 * h);
  }
  return g;
}

Vec3 DistanceField::normal(const Vec3& q) const {
  double sq = 0.0;
  const int nearest = tree_.nearest(q, &sq);
  if (sq < 1e-18 && has_point_normals()) return point_normals_[nearest];

  const Vec3 g = gradient(q);
  const double len = g.norm();
  if (len < 1e-9) throw PipelineError("distance field: singular gradient");
  return g / len;
}

DepthMap sphere_trace_depth(const DistanceField& field, const Camera& cam) {
  cam.validate();
  DepthMap dm(cam.width, cam.height);

  parallel_for(0, cam.height, [&](int y) {
    for (int x = 0; x < cam.width; ++x) {
      const Vec3 dir = cam.ray_dir(x + 0.5, y + 0.5);
      double t = 0.0;
      for (int iter = 0; iter < 100000; ++iter) {
        const Vec3 p = cam.position + t * dir;
        const double d = field.udf(p);
        if (d < field.surface_eps()) {
          const size_t i = static_cast<size_t>(y) * cam.width + x;
          dm.depth[i] = t;
          dm.hit[i] = 1;
          break;
        }
        t += d;
        if (t > DistanceField::kFarBound) break;
      }
    }
  }, 8);

  return dm;
}

}  // namespace gap
