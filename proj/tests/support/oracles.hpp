#pragma once

// Independent reference implementations used to check the library. These
// deliberately avoid the library's computation paths: the renderer oracle is
// untiled with Eigen-derived axes, neighbor searches are linear scans, and all
// formula oracles are written straight from their definitions.

#include "gap/camera.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/rasterizer.hpp"
#include "gap/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gap::testing {

// ---- distance field oracles -------------------------------------------------

double brute_udf(const std::vector<Vec3>& points, const Vec3& q, int smoothing_k = 1);

// ---- rendering oracles ------------------------------------------------------

struct OraclePixel {
  Vec3 color = Vec3::Zero();
  double alpha = 0.0;
  double transmittance = 1.0;
  double depth = 0.0;
};

// Per-pixel full-sort compositing over every disk, no tiling or bounds.
OraclePixel oracle_composite_pixel(const GaussianSet& set, const Camera& cam, int px, int py,
                                   const Vec3& background);
ImageRGB oracle_render(const GaussianSet& set, const Camera& cam, const Vec3& background);

// Exhaustive first-hit selection over the masked rays.
std::vector<int32_t> oracle_first_hit(const GaussianSet& set, const Camera& cam,
                                      const std::vector<uint8_t>& mask);

// ---- scalar loss + finite differences ---------------------------------------

double kahan_sum(const std::vector<double>& values);

// L = sum_pixels dL_dcolor . color, compensated summation.
double render_scalar_loss(const GaussianSet& set, const Camera& cam, const ImageRGB& dldc,
                          const Vec3& background, uint64_t* composition_hash = nullptr);

struct GradCheckReport {
  bool usable = true;       // false: a compositing branch flipped or an entry
                            // fell into the finite-difference dead zone
  std::string reject_note;
  double max_rel_error = 0.0;
  int entries_checked = 0;
};

// Central-difference check of render_backward over every attribute of every
// disk. Entries with |analytic| < 1e-6 are excluded (per contract); entries in
// [1e-6, dead_zone) mark the scene unusable instead of asserting.
GradCheckReport check_render_gradients(GaussianSet set, const Camera& cam, const ImageRGB& dldc,
                                       const Vec3& background, double h, double dead_zone,
                                       double rel_tol);

double central_diff(const std::function<double(double)>& f, double x0, double h);

// ---- Eq. 12-15 formula oracles ----------------------------------------------

Vec3 oracle_color_diffuse(const GaussianSet& set, uint32_t j, int neighbor_count,
                          double normal_gate);
double oracle_size_scale_raw(const GaussianSet& set, uint32_t j, int neighbor_count);
double oracle_opacity_control(const GaussianSet& set, uint32_t j, double base_opacity,
                              double reference_count, double rho);

}  // namespace gap::testing
