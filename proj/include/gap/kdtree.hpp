#pragma once

#include "gap/types.hpp"

#include <vector>

namespace gap {

// Static 3D kd-tree. Immutable after construction; queries are thread-safe.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }

  // Index of the closest point; sq_dist receives the squared distance.
  int nearest(const Vec3& q, double* sq_dist = nullptr) const;

  // k closest points, ascending by distance (ties broken by index).
  // Returns min(k, size()) entries.
  void knn(const Vec3& q, int k, std::vector<int>& idx, std::vector<double>& dist) const;

  // Number of points with ||p - q|| <= radius.
  int count_within(const Vec3& q, double radius) const;

 private:
  struct Node {
    float split = 0.f;
    int axis = -1;      // -1 marks a leaf
    int begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(int begin, int end, std::vector<Vec3>& bb_min, std::vector<Vec3>& bb_max);

  std::vector<Vec3> points_;     // reordered copy
  std::vector<int> ids_;         // reordered -> original index
  std::vector<Node> nodes_;
  std::vector<Vec3> node_min_, node_max_;
  int root_ = -1;
};

}  // namespace gap
