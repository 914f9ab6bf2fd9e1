#include "gap/gaussian_inpaint.hpp"

#include "gap/errors.hpp"
#include "gap/kdtree.hpp"
#include "gap/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace gap {

void InpaintConfig::validate() const {
  if (neighbor_count < 1) throw ConfigError("inpaint: neighbor count must be >= 1");
  if (normal_gate != 0.5) throw ConfigError("inpaint: the normal gate is fixed at 0.5");
  if (!(base_opacity > 0) || base_opacity > 1)
    throw ConfigError("inpaint: base opacity must be in (0, 1]");
  if (!(reference_count >= 1)) throw ConfigError("inpaint: reference count must be >= 1");
}

std::vector<uint32_t> find_unseen(const GaussianSet& set) {
  std::vector<uint32_t> out;
  for (size_t i = 0; i < set.size(); ++i)
    if (!set.seen[i]) out.push_back(static_cast<uint32_t>(i));
  return out;
}

void color_diffuse(GaussianSet& set, const std::vector<uint32_t>& unseen,
                   const InpaintConfig& cfg) {
  cfg.validate();
  if (unseen.empty()) return;

  std::vector<Vec3> seen_centers;
  std::vector<uint32_t> seen_ids;
  for (size_t i = 0; i < set.size(); ++i) {
    if (set.seen[i]) {
      seen_centers.push_back(set.centers[i]);
      seen_ids.push_back(static_cast<uint32_t>(i));
    }
  }
  if (seen_centers.empty()) throw PipelineError("color_diffuse: nothing to diffuse from");
  const KdTree seen_tree(std::move(seen_centers));

  std::vector<Vec3> normals(set.size());
  for (size_t i = 0; i < set.size(); ++i) normals[i] = rotation_axes(set.rotations[i]).col(2);

  std::vector<Vec3> new_colors(unseen.size());
  parallel_for(0, static_cast<int>(unseen.size()), [&](int k) {
    const uint32_t j = unseen[k];
    std::vector<int> idx;
    std::vector<double> dist;
    seen_tree.knn(set.centers[j], cfg.neighbor_count, idx, dist);

    double o_max = 0.0;
    for (int i : idx) o_max = std::max(o_max, set.opacities[seen_ids[i]]);
    double inv_dist_sum = 0.0;
    for (double d : dist) inv_dist_sum += 1.0 / std::max(d, 1e-12);

    Vec3 weighted = Vec3::Zero();
    double weight_sum = 0.0;
    for (size_t t = 0; t < idx.size(); ++t) {
      const uint32_t i = seen_ids[idx[t]];
      const double ndot = normals[i].dot(normals[j]);
      if (!(ndot > cfg.normal_gate)) continue;
      const double inv_d = 1.0 / std::max(dist[t], 1e-12);
      const double lambda =
          (inv_d / inv_dist_sum) * ndot * (o_max > 0 ? set.opacities[i] / o_max : 0.0);
      weighted += lambda * set.colors[i];
      weight_sum += lambda;
    }

    if (weight_sum > 0) {
      new_colors[k] = weighted / weight_sum;
    } else {
      // every neighbor gated out: copy the nearest seen disk's color
      new_colors[k] = set.colors[seen_ids[idx[0]]];
    }
  });

  for (size_t k = 0; k < unseen.size(); ++k) set.colors[unseen[k]] = new_colors[k];
}

double size_scale_raw(double mean_neighbor_distance) { return std::log(mean_neighbor_distance); }

void size_scale(GaussianSet& set, const std::vector<uint32_t>& unseen, const InpaintConfig& cfg) {
  cfg.validate();
  if (unseen.empty()) return;
  if (set.size() < static_cast<size_t>(cfg.neighbor_count) + 1)
    throw PipelineError("size_scale: need at least L+1 disks");
  if (!(cfg.tau > 0)) throw PipelineError("size_scale: tau not set");

  const KdTree tree(set.centers);
  std::vector<Vec2> new_scales(unseen.size());
  parallel_for(0, static_cast<int>(unseen.size()), [&](int k) {
    const uint32_t j = unseen[k];
    std::vector<int> idx;
    std::vector<double> dist;
    tree.knn(set.centers[j], cfg.neighbor_count + 1, idx, dist);
    double sum = 0.0;
    int count = 0;
    for (size_t t = 0; t < idx.size() && count < cfg.neighbor_count; ++t) {
      if (static_cast<uint32_t>(idx[t]) == j) continue;
      sum += dist[t];
      ++count;
    }
    const double mean = sum / std::max(count, 1);
    const double radius = std::clamp(std::exp(size_scale_raw(mean)), 1e-4, cfg.tau);
    new_scales[k] = Vec2(radius, radius);
  });

  for (size_t k = 0; k < unseen.size(); ++k) set.scales[unseen[k]] = new_scales[k];
}

void opacity_control(GaussianSet& set, const std::vector<uint32_t>& unseen,
                     const InpaintConfig& cfg) {
  cfg.validate();
  if (unseen.empty()) return;
  if (!(cfg.rho > 0)) throw PipelineError("opacity_control: rho not set");

  const KdTree tree(set.centers);
  std::vector<double> new_opacities(unseen.size());
  parallel_for(0, static_cast<int>(unseen.size()), [&](int k) {
    const uint32_t j = unseen[k];
    // the query point itself is in the tree; exclude it from the count
    const int p = tree.count_within(set.centers[j], cfg.rho) - 1;
    new_opacities[k] = cfg.base_opacity / std::max(1.0, p / cfg.reference_count);
  });

  for (size_t k = 0; k < unseen.size(); ++k) set.opacities[unseen[k]] = new_opacities[k];
}

}  // namespace gap
