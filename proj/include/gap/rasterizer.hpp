#pragma once

#include "gap/camera.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/types.hpp"

#include <cstdint>
#include <vector>

namespace gap {

// Compositing contract constants; the acceptance oracles rely on these.
inline constexpr double kAlphaCutoff = 1.0 / 255.0;   // contributions below are skipped
inline constexpr double kMinTransmittance = 1e-4;     // per-pixel early termination
inline constexpr double kHitDensity = 0.1;            // selection density threshold
inline constexpr double kSelectMinOpacity = 0.05;     // selection opacity floor
inline constexpr int kTileSize = 16;

struct RenderBuffers {
  ImageRGB color;
  std::vector<double> depth;  // weight-averaged splat depth (diagnostic)
  std::vector<double> alpha;  // accumulated opacity, sum of weights
  Vec3 background = Vec3::Zero();
};

struct VisibleSet {
  std::vector<uint32_t> indices;  // sorted, unique
  std::vector<double> cosines;    // observation cosine per index, in [-1, 1]
};

// Gradients aligned with the set's arrays; rotation gradients are in
// (w, x, y, z) component order of the stored quaternion.
struct GaussianGradients {
  std::vector<Vec3> center;
  std::vector<Vec4> rotation_wxyz;
  std::vector<Vec2> scale;
  std::vector<double> opacity;
  std::vector<Vec3> color;

  void resize_zero(size_t n) {
    center.assign(n, Vec3::Zero());
    rotation_wxyz.assign(n, Vec4::Zero());
    scale.assign(n, Vec2::Zero());
    opacity.assign(n, 0.0);
    color.assign(n, Vec3::Zero());
  }
};

// Tile-based forward splatting. Per pixel, ray-disk intersections are
// depth-sorted front-to-back and alpha-composited; the disk density is
// evaluated at the exact ray-plane intersection (perspective-correct).
// `composition_hash`, when given, receives a digest of exactly which
// contributions were composited per pixel (used to detect branch changes in
// finite-difference checks).
RenderBuffers render(const GaussianSet& set, const Camera& cam, const Vec3& background,
                     uint64_t* composition_hash = nullptr);

// Analytic gradients of L = sum_pixels dL_dcolor . color with respect to every
// disk attribute. Disks that contribute nothing get exactly zero gradients.
GaussianGradients render_backward(const GaussianSet& set, const Camera& cam,
                                  const ImageRGB& dL_dcolor, const Vec3& background);

// Per-pixel index of the first qualifying intersection (density >= kHitDensity,
// opacity >= kSelectMinOpacity, smallest positive ray parameter), -1 if none.
// `mask` (W*H, nullable) restricts which pixels trace rays.
std::vector<int32_t> first_hit_map(const GaussianSet& set, const Camera& cam,
                                   const uint8_t* mask);

// Deduplicated union of first hits over the masked rays, with the observation
// cosine of the disk normal (oriented toward the camera) against the
// center-to-camera direction.
VisibleSet select_first_hit(const GaussianSet& set, const Camera& cam,
                            const std::vector<uint8_t>& pixel_mask);

}  // namespace gap
