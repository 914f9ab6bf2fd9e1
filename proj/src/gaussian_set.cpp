#include "gap/gaussian_set.hpp"

#include "gap/errors.hpp"
#include "gap/kdtree.hpp"
#include "gap/parallel.hpp"

#include <cmath>

namespace gap {

Mat3 rotation_axes(const Quat& q) {
  const Quat qn = q.normalized();
  const double w = qn.w(), x = qn.x(), y = qn.y(), z = qn.z();
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Quat rotation_from_normal(const Vec3& n_in) {
  const Vec3 n = n_in.normalized();
  Vec3 ref = Vec3::UnitX();
  if (std::abs(n.dot(ref)) > 0.999) ref = Vec3::UnitY();
  const Vec3 tu = (ref - n.dot(ref) * n).normalized();
  const Vec3 tv = n.cross(tu);

  Mat3 r;
  r.col(0) = tu;
  r.col(1) = tv;
  r.col(2) = n;
  return Quat(r).normalized();
}

GaussianSet init_gaussians(const PointCloud& cloud, const std::vector<Vec3>& normals) {
  if (cloud.size() != normals.size())
    throw PipelineError("init_gaussians: cloud and normal counts differ");
  const size_t m = cloud.size();

  const KdTree tree(cloud.points);
  GaussianSet set;
  set.centers = cloud.points;
  set.rotations.resize(m);
  set.scales.resize(m);
  set.opacities.assign(m, 0.9);
  set.colors.assign(m, Vec3::Constant(0.5));
  set.best_view_cos.assign(m, -1.0);
  set.seen.assign(m, 0);

  parallel_for(0, static_cast<int>(m), [&](int i) {
    set.rotations[i] = rotation_from_normal(normals[i]);

    std::vector<int> idx;
    std::vector<double> dist;
    tree.knn(cloud.points[i], 4, idx, dist);
    double sum = 0.0;
    int count = 0;
    for (size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] == i) continue;
      sum += dist[j];
      if (++count == 3) break;
    }
    // clouds with < 4 points degenerate to the available neighbors
    const double s = count > 0 ? sum / count : 1e-3;
    set.scales[i] = Vec2(s, s);
  });

  return set;
}

Mat3 covariance_of(const GaussianDisk& g) {
  const Mat3 r = rotation_axes(g.rotation);
  Vec3 d(g.scale.x() * g.scale.x(), g.scale.y() * g.scale.y(), 0.0);
  return r * d.asDiagonal() * r.transpose();
}

double evaluate_density(const GaussianDisk& g, const Vec2& u) {
  const double a = u.x() / g.scale.x();
  const double b = u.y() / g.scale.y();
  return std::exp(-0.5 * (a * a + b * b));
}

Vec3 disk_normal(const GaussianDisk& g) { return rotation_axes(g.rotation).col(2); }

double mean_knn_spacing(const std::vector<Vec3>& points, int k) {
  if (points.size() < 2) return 1e-3;
  const KdTree tree(points);
  const int n = static_cast<int>(points.size());
  std::vector<double> per_point(n, 0.0);
  parallel_for(0, n, [&](int i) {
    std::vector<int> idx;
    std::vector<double> dist;
    tree.knn(points[i], k + 1, idx, dist);
    double sum = 0.0;
    int count = 0;
    for (size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] == i) continue;
      sum += dist[j];
      if (++count == k) break;
    }
    per_point[i] = count > 0 ? sum / count : 0.0;
  });
  double total = 0.0;
  for (double v : per_point) total += v;
  return total / n;
}

}  // namespace gap
