#pragma once

#include "gap/camera.hpp"
#include "gap/distance_field.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/rasterizer.hpp"
#include "gap/types.hpp"

#include <utility>
#include <vector>

namespace gap {

enum class MaskLabel : uint8_t {
  kOffSurface = 0,
  kKeep = 1,
  kUpdate = 2,
  kGenerate = 3,
};

struct TriMask {
  int width = 0;
  int height = 0;
  std::vector<MaskLabel> labels;

  TriMask() = default;
  TriMask(int w, int h) : width(w), height(h), labels(static_cast<size_t>(w) * h, MaskLabel::kOffSurface) {}

  MaskLabel at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }

  struct Counts {
    size_t off_surface = 0, keep = 0, update = 0, generate = 0;
  };
  Counts counts() const;
};

struct ViewSchedule {
  std::vector<Camera> cameras;
  double radius = 2.5;
  std::vector<std::pair<double, double>> pattern;  // (azimuth, elevation) per camera
};

// Cameras at spherical positions (radius, azimuth_k, elevation_e), all aimed at
// the origin, ordered by elevation ring then azimuth. radius must exceed 1
// (outside the unit cube); n_azimuth >= 2.
ViewSchedule make_schedule(int n_azimuth, const std::vector<double>& elevations, double radius,
                           double fov_y, int width, int height);

// Appends top/bottom polar views to a schedule.
void add_polar_views(ViewSchedule& schedule, double fov_y, int width, int height);

// Per-pixel label against the current record: GENERATE where the first-hit
// disk was never seen, UPDATE where this view observes it at a strictly better
// cosine, KEEP otherwise; OFF_SURFACE exactly at depth misses.
TriMask classify_masks(const DepthMap& depth, const Camera& cam, const GaussianSet& set,
                       const DistanceField& field);

// seen := true and best_view_cos := max(best_view_cos, cosine) per visible disk.
void update_similarity_record(GaussianSet& set, const VisibleSet& visible);

// KEEP and OFF_SURFACE take the rendered pixel, GENERATE/UPDATE the inpainted.
ImageRGB composite_final(const ImageRGB& rendered, const ImageRGB& inpainted, const TriMask& mask);

// 1 at GENERATE or UPDATE pixels (selection / provider mask).
std::vector<uint8_t> generate_update_mask(const TriMask& mask);

// 8-bit debug/wire encoding: 0 = OFF_SURFACE, 85 = KEEP, 170 = UPDATE, 255 = GENERATE.
std::vector<uint8_t> mask_to_palette(const TriMask& mask);
TriMask mask_from_palette(const std::vector<uint8_t>& values, int width, int height);

}  // namespace gap
