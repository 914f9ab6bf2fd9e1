#include "gap/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace gap {

namespace {

constexpr int kLeafSize = 16;

inline double sq_dist_to_box(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  double d = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double v = q[a] < lo[a] ? lo[a] - q[a] : (q[a] > hi[a] ? q[a] - hi[a] : 0.0);
    d += v * v;
  }
  return d;
}

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) {
  const std::vector<Vec3> original = std::move(points);
  ids_.resize(original.size());
  for (size_t i = 0; i < ids_.size(); ++i) ids_[i] = static_cast<int>(i);
  points_ = original;
  if (original.empty()) return;

  // Build over the permutation, then commit the reordered copy.
  struct Frame {
    int begin, end, parent, side;  // side: 0 = left child, 1 = right child
  };
  std::vector<Frame> work;
  work.push_back({0, static_cast<int>(original.size()), -1, 0});
  while (!work.empty()) {
    const Frame f = work.back();
    work.pop_back();

    Vec3 lo = original[ids_[f.begin]], hi = lo;
    for (int i = f.begin + 1; i < f.end; ++i) {
      lo = lo.cwiseMin(original[ids_[i]]);
      hi = hi.cwiseMax(original[ids_[i]]);
    }
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    node_min_.push_back(lo);
    node_max_.push_back(hi);
    if (f.parent < 0) {
      root_ = node_id;
    } else if (f.side == 0) {
      nodes_[f.parent].left = node_id;
    } else {
      nodes_[f.parent].right = node_id;
    }

    Node& node = nodes_[node_id];
    node.begin = f.begin;
    node.end = f.end;
    if (f.end - f.begin <= kLeafSize) {
      node.axis = -1;
      continue;
    }

    int axis = 0;
    const Vec3 extent = hi - lo;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;

    const int mid = (f.begin + f.end) / 2;
    std::nth_element(ids_.begin() + f.begin, ids_.begin() + mid, ids_.begin() + f.end,
                     [&](int a, int b) {
                       if (original[a][axis] != original[b][axis])
                         return original[a][axis] < original[b][axis];
                       return a < b;
                     });
    node.axis = axis;
    node.split = static_cast<float>(original[ids_[mid]][axis]);
    work.push_back({mid, f.end, node_id, 1});
    work.push_back({f.begin, mid, node_id, 0});
  }

  for (size_t i = 0; i < ids_.size(); ++i) points_[i] = original[ids_[i]];
}

int KdTree::nearest(const Vec3& q, double* sq_dist) const {
  double best = std::numeric_limits<double>::infinity();
  int best_id = -1;
  if (root_ < 0) {
    if (sq_dist) *sq_dist = best;
    return best_id;
  }

  int stack[64];
  int top = 0;
  stack[top++] = root_;
  while (top > 0) {
    const int id = stack[--top];
    if (sq_dist_to_box(q, node_min_[id], node_max_[id]) >= best && best_id >= 0) continue;
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const double d = (points_[i] - q).squaredNorm();
        if (d < best || (d == best && ids_[i] < best_id)) {
          best = d;
          best_id = ids_[i];
        }
      }
      continue;
    }
    const bool left_first = q[n.axis] < n.split;
    stack[top++] = left_first ? n.right : n.left;
    stack[top++] = left_first ? n.left : n.right;
  }
  if (sq_dist) *sq_dist = best;
  return best_id;
}

void KdTree::knn(const Vec3& q, int k, std::vector<int>& idx, std::vector<double>& dist) const {
  idx.clear();
  dist.clear();
  if (k <= 0 || points_.empty()) return;
  k = std::min<int>(k, static_cast<int>(points_.size()));

  using Entry = std::pair<double, int>;  // (sq_dist, original index), max-heap
  std::vector<Entry> heap;
  heap.reserve(k + 1);

  int stack[64];
  int top = 0;
  stack[top++] = root_;
  while (top > 0) {
    const int id = stack[--top];
    if (static_cast<int>(heap.size()) == k &&
        sq_dist_to_box(q, node_min_[id], node_max_[id]) > heap.front().first)
      continue;
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const Entry e{(points_[i] - q).squaredNorm(), ids_[i]};
        if (static_cast<int>(heap.size()) < k) {
          heap.push_back(e);
          std::push_heap(heap.begin(), heap.end());
        } else if (e < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = e;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      continue;
    }
    const bool left_first = q[n.axis] < n.split;
    stack[top++] = left_first ? n.right : n.left;
    stack[top++] = left_first ? n.left : n.right;
  }

  std::sort_heap(heap.begin(), heap.end());
  idx.reserve(heap.size());
  dist.reserve(heap.size());
  for (const auto& [d, i] : heap) {
    idx.push_back(i);
    dist.push_back(std::sqrt(d));
  }
}

int KdTree::count_within(const Vec3& q, double radius) const {
  if (root_ < 0 || radius < 0) return 0;
  const double r2 = radius * radius;
  int count = 0;
  int stack[64];
  int top = 0;
  stack[top++] = root_;
  while (top > 0) {
    const int id = stack[--top];
    if (sq_dist_to_box(q, node_min_[id], node_max_[id]) > r2) continue;
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i)
        if ((points_[i] - q).squaredNorm() <= r2) ++count;
      continue;
    }
    stack[top++] = n.left;
    stack[top++] = n.right;
  }
  return count;
}

}  // namespace gap
