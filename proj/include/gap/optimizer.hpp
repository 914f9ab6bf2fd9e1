#pragma once

#include "gap/camera.hpp"
#include "gap/distance_field.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/losses.hpp"
#include "gap/rasterizer.hpp"
#include "gap/types.hpp"

#include <vector>

namespace gap {

struct OptimConfig {
  int steps_per_view = 150;
  // per-attribute-group learning rates
  double lr_center = 1.6e-4;
  double lr_rotation = 1e-3;
  double lr_scale = 5e-3;
  double lr_opacity = 5e-2;
  double lr_color = 2.5e-2;
  // combined objective weights: rendering + alpha * distance + beta * scale
  double alpha = 1.0;
  double beta = 10.0;
  double tau = 0.0;  // scale cap; <= 0 means "derive 2x mean 3-NN spacing"
  bool densify = false;
  double densify_grad_threshold = 2e-4;
  // adaptive-moment parameters
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-15;

  void validate() const;
};

struct ViewReport {
  int view_index = -1;
  size_t visible_count = 0;
  int steps = 0;
  double loss_initial = 0.0;
  double loss_final = 0.0;
  double render_loss_initial = 0.0;
  double render_loss_final = 0.0;
  double distance_loss_final = 0.0;
  bool non_decreasing = false;  // set when the pass failed to reduce the loss
  bool skipped = false;
};

// Single optimization pass for one view: steps_per_view adaptive-moment
// updates on the visible disks only; every other disk is left bit-identical.
// After the pass quaternions are renormalized, scales clamped to [1e-5, inf)
// and opacities to [0, 1]. `accum_center_grad`, when non-null (size M),
// accumulates the mean rendering-gradient norm per disk for densification.
ViewReport optimize_view(GaussianSet& set, const VisibleSet& visible, const ImageRGB& target,
                         const Camera& cam, const DistanceField& field, const OptimConfig& cfg,
                         const Vec3& background = Vec3::Zero(),
                         std::vector<double>* accum_center_grad = nullptr);

// Split/clone densification: disks whose accumulated gradient norm exceeds the
// threshold are cloned (max scale < tau/2, copy offset one scale along the
// larger tangent axis) or split (two disks at +-0.5 scale, scales / 1.6).
// New disks inherit color/opacity and start unseen.
GaussianSet densify(const GaussianSet& set, const std::vector<double>& grads,
                    const OptimConfig& cfg);

}  // namespace gap
