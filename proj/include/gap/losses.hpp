#pragma once

#include "gap/distance_field.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/rasterizer.hpp"
#include "gap/types.hpp"

#include <vector>

namespace gap {

// Mean |f_u(center)| over the visible disks. Per-disk center gradients (the
// derivative of each disk's own |f_u| term, not divided by the count) go to
// grad_centers when non-null, aligned with visible.indices; exactly zero on
// the surface where the UDF gradient is singular.
double distance_loss(const GaussianSet& set, const VisibleSet& visible,
                     const DistanceField& field, std::vector<Vec3>* grad_centers = nullptr);

// Mean (min(max(s), tau) - max(s))^2 over the visible disks. Per-disk scale
// gradients flow only to the larger component (ties split equally).
double scale_loss(const GaussianSet& set, const VisibleSet& visible, double tau,
                  std::vector<Vec2>* grad_scales = nullptr);

struct RenderingLoss {
  double value = 0.0;   // 0.8 * l1 + 0.2 * dssim
  double l1 = 0.0;
  double dssim = 0.0;   // (1 - mean SSIM) / 2
  ImageRGB grad;        // dL/d(rendered)
};

// Eq.-10-style rendering constraint: 0.8 L1 + 0.2 D-SSIM with an 11x11
// Gaussian window (sigma 1.5) on the interior (valid) region. Images must be
// at least 11 pixels in each dimension.
RenderingLoss rendering_loss(const ImageRGB& rendered, const ImageRGB& target);

}  // namespace gap
